// Command-line front end: run, sweep, bench and dump.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "leakscope/pipeline.hpp"

using namespace leakscope;

namespace {

struct Options {
    RunSpec spec;
    std::string method;
    std::string observe;
    double epsilon = 0.0;
    double sensitivity = 0.0;
    std::int64_t size = -1;
    std::vector<std::int64_t> grid;
    int repeats = 5;
    double oracle = 0.0;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--scenario", o.spec.scenario, "agg-kal, agg-kab, ano, k-ano, dp-agg, syn-cont, syn-disc, syn-complex")
        ->required();
    cmd->add_option("--method", o.method, "forward, rejection, importance, metropolis or exact");
    cmd->add_option("--samples", o.spec.samples, "number of samples")->capture_default_str();
    cmd->add_option("--seed", o.spec.seed, "random seed")->capture_default_str();
    cmd->add_option("--chains", o.spec.chains, "Metropolis chains")->capture_default_str();
    cmd->add_option("--burn-in", o.spec.burn_in, "Metropolis burn-in per chain")->capture_default_str();
    cmd->add_option("--epsilon", o.epsilon, "privacy budget (dp-agg)");
    cmd->add_option("--sensitivity", o.sensitivity, "query sensitivity (dp-agg)");
    cmd->add_option("--k", o.spec.k, "anonymity parameter (k-ano)")->capture_default_str();
    cmd->add_option("--size", o.size, "dataset size, number of inputs or array length");
    cmd->add_option("--names", o.spec.names, "name support size")->capture_default_str();
    cmd->add_option("--zips", o.spec.zips, "zip support size")->capture_default_str();
    cmd->add_option("--days", o.spec.days, "birthday support size")->capture_default_str();
    cmd->add_option("--ill-prob", o.spec.ill_prob, "probability of an Ill diagnosis")->capture_default_str();
    cmd->add_option("--sigma-s", o.spec.sigma_s, "std of s (syn-cont)")->capture_default_str();
    cmd->add_option("--sigma-p", o.spec.sigma_p, "std of each p_i (syn-cont)")->capture_default_str();
    cmd->add_option("--n", o.spec.n, "upper bound of the uniform inputs (syn-disc, syn-complex)")->capture_default_str();
    cmd->add_option("--c", o.spec.c, "loop depth (syn-complex)")->capture_default_str();
    cmd->add_option("--observe", o.observe, "evidence: name:lo:hi, name=value or none");
    cmd->add_option("--measure", o.spec.measures, "measure, e.g. 'P(a<18)', 'kl(a)', 'mi(a;o)' (repeatable)");
}

void finalize(Options& o) {
    if (!o.method.empty()) o.spec.method = parse_method(o.method);
    if (!o.observe.empty()) o.spec.observe = o.observe;
    if (o.epsilon != 0.0) o.spec.epsilon = o.epsilon;
    if (o.sensitivity != 0.0) o.spec.sensitivity = o.sensitivity;
    if (o.size >= 0) o.spec.size = o.size;
}

/// Writes through `write` to `path`, or to stdout when path is empty.
template <class F>
void emit(const std::string& path, F write) {
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    write(os);
    os.flush();
    if (!os) throw IoError("failed writing '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Privacy leakage analysis of data-disclosure programs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    Options o;
    std::string samples_out;

    auto* run_cmd = app.add_subcommand("run", "sample a scenario and report measures as JSON");
    add_common(run_cmd, o);
    run_cmd->add_option("--out", o.spec.out, "results JSON path (stdout when omitted)");
    run_cmd->add_option("--samples-out", o.spec.samples_out, "also write the samples as CSV");

    std::string sweep_out;
    auto* sweep_cmd = app.add_subcommand("sweep", "estimator error against a closed-form oracle per sample count");
    add_common(sweep_cmd, o);
    sweep_cmd->add_option("--grid", o.grid, "sample counts, comma separated")->delimiter(',')->required();
    sweep_cmd->add_option("--repeats", o.repeats, "seeds per grid point")->capture_default_str();
    auto* oracle_opt = sweep_cmd->add_option("--oracle", o.oracle, "reference value (default: built-in closed form)");
    sweep_cmd->add_option("--out", sweep_out, "CSV path (stdout when omitted)");

    std::string bench_out;
    auto* bench_cmd = app.add_subcommand("bench", "sampling wall-clock time per size");
    add_common(bench_cmd, o);
    bench_cmd->add_option("--grid", o.grid, "sizes, comma separated")->delimiter(',');
    bench_cmd->add_option("--out", bench_out, "CSV path (stdout when omitted)");

    std::string dump_out;
    auto* dump_cmd = app.add_subcommand("dump", "write the samples of a scenario as CSV");
    add_common(dump_cmd, o);
    dump_cmd->add_option("--out", dump_out, "CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ExitCode::Usage);
    }

    try {
        finalize(o);
        if (run_cmd->parsed()) {
            const ResultsDocument doc = run(o.spec);
            if (o.spec.out.empty()) std::cout << to_json(doc) << '\n';
        } else if (sweep_cmd->parsed()) {
            std::vector<std::size_t> grid;
            for (auto g : o.grid) {
                if (g <= 0) throw UsageError("sample grid entries must be positive");
                grid.push_back(static_cast<std::size_t>(g));
            }
            std::optional<double> oracle;
            if (oracle_opt->count() > 0) oracle = o.oracle;
            const auto rows = sweep(o.spec, grid, o.repeats, oracle);
            emit(sweep_out, [&](std::ostream& os) { write_sweep_csv(rows, os); });
        } else if (bench_cmd->parsed()) {
            const auto rows = bench(o.spec, o.grid);
            emit(bench_out, [&](std::ostream& os) { write_bench_csv(rows, os); });
        } else if (dump_cmd->parsed()) {
            dump_samples(o.spec, dump_out);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(exit_code_for(e));
    }
    return 0;
}
