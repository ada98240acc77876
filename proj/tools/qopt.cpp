#include "qopt/commands.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace {

std::pair<long, long> parse_levels(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) throw qopt::ArgumentError("--levels expects J1..J2, got \"" + text + "\"");
    auto parse = [&](std::string_view s) {
        long v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) throw qopt::ArgumentError("bad level \"" + std::string(s) + "\"");
        return v;
    };
    const std::string_view sv(text);
    return {parse(sv.substr(0, dots)), parse(sv.substr(dots + 2))};
}

void emit(const qopt::RunConfig& cfg, const std::string& command, const std::function<void(std::ostream&)>& body) {
    if (cfg.out.empty()) {
        body(std::cout);
        return;
    }
    std::ofstream os(cfg.out);
    if (!os) throw qopt::ArgumentError("cannot write " + cfg.out);
    body(os);
    std::ofstream side(cfg.out + ".json");
    if (!side) throw qopt::ArgumentError("cannot write " + cfg.out + ".json");
    side << cfg.to_json(command).dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasi-optimal index sets and truncation error estimates"};
    app.require_subcommand(1);

    qopt::RunConfig cfg;
    std::string levels, model_spec;
    std::vector<std::size_t> Ms;
    std::optional<int> inject;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--model", model_spec, "Model JSON file or preset name (P1..P6)");
        sub->add_option("--out", cfg.out, "Output path; a JSON sidecar with the config is written next to it");
        sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", cfg.seed, "Seed for sampled checks");
        sub->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
        sub->add_option("--tol", cfg.tol, "Relative tolerance");
    };

    auto* tail = app.add_subcommand("tail", "Exact tails and estimates per cardinality");
    add_common(tail);
    tail->add_option("--M", Ms, "Cardinalities")->delimiter(',');
    tail->add_option("--levels", levels, "Integer levels J1..J2 (default 0..30)");
    tail->add_option("--eps", cfg.eps, "Relaxation parameters")->delimiter(',');
    tail->add_option("--p", cfg.p, "Stechkin exponents")->delimiter(',');
    tail->add_option("--xi", cfg.xi, "Optimized Stechkin parameter");

    auto* mincard = app.add_subcommand("mincard", "Minimum cardinalities per epsilon");
    add_common(mincard);
    mincard->add_option("--eps", cfg.eps, "Relaxation parameters")->delimiter(',');
    mincard->add_option("--inject-period", inject, "Force the Ehrhart period");

    auto* sumjn = app.add_subcommand("sumjn", "sum_{j>=J} j^N e^{-j} and its bounds");
    add_common(sumjn);
    sumjn->add_option("--dim", cfg.dim, "Exponent N (default: model dimension, else 20)");
    sumjn->add_option("--levels", levels, "Range J1..J2 (default 1..40)");

    auto* ehrhart = app.add_subcommand("ehrhart", "Ehrhart quasi-polynomial of the limiting polytope");
    add_common(ehrhart);
    ehrhart->add_option("--inject-period", inject, "Force the Ehrhart period");
    ehrhart->add_option("--max-verify", cfg.max_verify, "Held-out verification points");

    auto* vol = app.add_subcommand("volume", "Volume of the limiting set");
    add_common(vol);
    vol->add_option("--method", cfg.volume_method, "analytic_simplex or lattice_scaling");

    auto* check = app.add_subcommand("check", "Invariant checks on a model or all presets");
    add_common(check);
    check->add_option("--inject-period", inject, "Force the Ehrhart period");
    check->add_option("--oracle-box", cfg.oracle_box, "Box edge for the brute-force tail oracle");
    check->add_option("--oracle-tol", cfg.oracle_tol, "Allowed oracle discrepancy");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        cfg.model_spec = model_spec;
        if (!model_spec.empty()) cfg.model = qopt::load_model(model_spec);
        cfg.Ms = Ms;
        cfg.inject_period = inject;
        if (!levels.empty()) {
            if (!Ms.empty()) throw qopt::ArgumentError("--M and --levels are exclusive");
            cfg.levels = parse_levels(levels);
        }
        if (command == "tail") {
            const auto t = qopt::cmd_tail(cfg);
            emit(cfg, command, [&](std::ostream& os) { t.write(os, cfg.format); });
        } else if (command == "mincard") {
            const auto t = qopt::cmd_mincard(cfg);
            emit(cfg, command, [&](std::ostream& os) { t.write(os, cfg.format); });
        } else if (command == "sumjn") {
            const auto t = qopt::cmd_sumjn(cfg);
            emit(cfg, command, [&](std::ostream& os) { t.write(os, cfg.format); });
        } else if (command == "ehrhart") {
            const auto doc = qopt::cmd_ehrhart(cfg);
            emit(cfg, command, [&](std::ostream& os) {
                if (cfg.format == "json") os << doc.dump(2) << '\n';
                else qopt::ehrhart_table(doc).write_csv(os);
            });
        } else if (command == "volume") {
            const auto t = qopt::cmd_volume(cfg);
            emit(cfg, command, [&](std::ostream& os) { t.write(os, cfg.format); });
        } else {
            try {
                const auto doc = qopt::cmd_check(cfg);
                emit(cfg, command, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
            } catch (const qopt::ConsistencyError& e) {
                nlohmann::json doc{{"status", "consistency_failure"}, {"error", e.what()}};
                emit(cfg, command, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
                throw;
            }
        }
    } catch (const qopt::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
