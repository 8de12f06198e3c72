#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "leakscope/errors.hpp"
#include "leakscope/pipeline.hpp"

using namespace leakscope;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path scratch_dir() {
    const fs::path d = fs::temp_directory_path() / "leakscope_pipeline_test";
    fs::create_directories(d);
    return d;
}

const ResultRow& row(const ResultsDocument& doc, const std::string& label) {
    for (const auto& r : doc.results)
        if (r.label == label) return r;
    throw std::runtime_error("missing result " + label);
}

}  // namespace

TEST_CASE("measure grammar") {
    auto m = parse_measure_request("P(a<18)");
    CHECK(m.kind == MeasureRequest::Kind::Probability);
    CHECK(m.column == "a");
    CHECK(m.op == MeasureRequest::Op::Lt);
    CHECK(m.rhs == Value::integer(18));
    m = parse_measure_request("P(o <= 54.5)");
    CHECK(m.op == MeasureRequest::Op::Le);
    CHECK(m.rhs == Value::real(54.5));
    m = parse_measure_request("P(s = Ill)");
    CHECK(m.rhs == Value::symbol("Ill"));
    m = parse_measure_request("kl(o||ro)");
    CHECK(m.kind == MeasureRequest::Kind::Kl);
    CHECK(m.other == "ro");
    m = parse_measure_request("kl(a)");
    CHECK(m.other.empty());
    m = parse_measure_request("mi(s_1;o)");
    CHECK(m.columns() == std::vector<std::string>{"s_1", "o"});
    CHECK(parse_measure_request("kde(a)").is_series());
    CHECK(parse_measure_request("disclosure(zip+day)").column == "output");
    CHECK_THROWS_AS(parse_measure_request("median(a)"), UsageError);
    CHECK_THROWS_AS(parse_measure_request("P(a)"), UsageError);
    CHECK_THROWS_AS(parse_measure_request("mean"), UsageError);
    CHECK_THROWS_AS(parse_measure_request("disclosure(age)"), UsageError);
}

TEST_CASE("run agg-kal end to end") {
    RunSpec spec;
    spec.scenario = "agg-kal";
    spec.method = Method::Metropolis;
    spec.measures = {"mean(a)", "std(a)", "P(a<18)", "kde(a)"};
    const auto doc = run(spec);
    CHECK(std::abs(row(doc, "mean(a)").value_bits_or_prob - 55.60) <= 0.01);
    CHECK(row(doc, "std(a)").value_bits_or_prob <= 0.02);
    CHECK(row(doc, "P(a<18)").value_bits_or_prob == 0.0);
    CHECK(row(doc, "mean(a)").n == 10000);
    CHECK(doc.series.size() == 1);
    CHECK(doc.series[0].kind == "kde");
    CHECK(doc.chain_samples == std::map<int, std::size_t>{{0, 5000}, {1, 5000}});
    CHECK(doc.method == "metropolis");
    CHECK(doc.timings.sampling >= 0.0);
}

TEST_CASE("run syn-disc exactly") {
    RunSpec spec;
    spec.scenario = "syn-disc";
    spec.method = Method::Exact;
    spec.n = 100;
    spec.measures = {"P(o=100)", "entropy(x)", "mi(x;o)", "mean(o)"};
    const auto doc = run(spec);
    CHECK(std::abs(row(doc, "P(o=100)").value_bits_or_prob - 1.0 / 101) < 1e-12);
    CHECK(row(doc, "entropy(x)").value_bits_or_prob == doctest::Approx(std::log2(101.0)).epsilon(1e-12));
    CHECK(row(doc, "mean(o)").value_bits_or_prob == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("usage errors leave no output") {
    const fs::path out = scratch_dir() / "never.json";
    fs::remove(out);
    RunSpec spec;
    spec.scenario = "agg-xyz";
    spec.out = out.string();
    CHECK_THROWS_AS(run(spec), UsageError);
    spec.scenario = "agg-kal";
    spec.measures = {"mean(zz)"};
    CHECK_THROWS_AS(run(spec), UsageError);
    spec.measures = {"bogus(a)"};
    CHECK_THROWS_AS(run(spec), UsageError);
    CHECK_FALSE(fs::exists(out));

    spec.measures = {};
    spec.size = 10;
    CHECK_THROWS_AS(run(spec), UsageError);
}

TEST_CASE("exit codes") {
    CHECK(exit_code_for(UsageError("x")) == ExitCode::Usage);
    CHECK(exit_code_for(std::invalid_argument("x")) == ExitCode::Usage);
    CHECK(exit_code_for(IoError("x")) == ExitCode::Io);
    CHECK(exit_code_for(InferenceError("x")) == ExitCode::Inference);
    CHECK(exit_code_for(SamplingError("x")) == ExitCode::Inference);

    RunSpec spec;
    spec.scenario = "agg-kal";
    spec.method = Method::Exact;
    try {
        run(spec);
        FAIL("expected an inference error");
    } catch (const std::exception& e) {
        CHECK(exit_code_for(e) == ExitCode::Inference);
    }
    spec.method = Method::Forward;
    spec.out = (scratch_dir() / "missing_dir" / "x.json").string();
    try {
        run(spec);
        FAIL("expected an io error");
    } catch (const std::exception& e) {
        CHECK(exit_code_for(e) == ExitCode::Io);
    }
}

TEST_CASE("results document round trip and determinism") {
    RunSpec spec;
    spec.scenario = "dp-agg";
    spec.samples = 2000;
    spec.epsilon = 0.5;
    spec.measures = {"kl(o||ro)", "mi(s_1;o)", "P(s_1<50)", "hist(o)"};
    const auto a = run(spec);
    const auto b = run(spec);
    CHECK(a.results == b.results);
    CHECK(a.series == b.series);
    const auto back = results_from_json(to_json(a));
    CHECK(back == a);
    CHECK(back.spec.epsilon == 0.5);
    CHECK_THROWS_AS(results_from_json("{\"spec\": 1}"), UsageError);
}

TEST_CASE("kl against the prior and observations from text") {
    RunSpec spec;
    spec.scenario = "syn-disc";
    spec.method = Method::Exact;
    spec.n = 3;
    spec.observe = "o=6";
    spec.measures = {"kl(x)", "P(x=3)"};
    const auto doc = run(spec);
    CHECK(row(doc, "P(x=3)").value_bits_or_prob == doctest::Approx(1.0));
    CHECK(row(doc, "kl(x)").value_bits_or_prob == doctest::Approx(2.0).epsilon(1e-12));

    spec.observe = "q=1";
    CHECK_THROWS_AS(run(spec), UsageError);
    spec.observe = "o:1";
    CHECK_THROWS_AS(run(spec), UsageError);
}

TEST_CASE("sweep") {
    RunSpec spec;
    spec.scenario = "syn-disc";
    spec.method = Method::Forward;
    spec.n = 100;
    spec.measures = {"P(o=100)"};
    const auto rows = sweep(spec, {1000}, 1);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].min == rows[0].max);
    CHECK(rows[0].mean_abs_err == doctest::Approx(rows[0].min));

    RunSpec once = spec;
    once.samples = 1000;
    const double est = row(run(once), "P(o=100)").value_bits_or_prob;
    CHECK(rows[0].mean_abs_err == doctest::Approx(std::abs(est - 1.0 / 101)));

    CHECK_THROWS_AS(sweep(spec, {}, 5), UsageError);
    spec.measures = {"mean(x)"};
    CHECK_THROWS_AS(sweep(spec, {100}, 2), UsageError);
    CHECK_NOTHROW(sweep(spec, {100}, 2, 50.0));

    std::ostringstream os;
    write_sweep_csv(rows, os);
    CHECK(os.str().rfind("n,mean_abs_err,min,max\n1000,", 0) == 0);
}

TEST_CASE("oracle registry") {
    RunSpec spec;
    spec.scenario = "syn-cont";
    auto m = parse_measure_request("P(o<55)");
    CHECK(oracle_for(spec, m).value() == doctest::Approx(0.7882).epsilon(1e-3));
    spec.scenario = "ano";
    m = parse_measure_request("disclosure(zip)");
    CHECK(oracle_for(spec, m).value() == doctest::Approx(std::pow(1 - 0.8 / 200, 999)));
    spec.scenario = "agg-kal";
    CHECK_FALSE(oracle_for(spec, parse_measure_request("mean(a)")).has_value());
}

TEST_CASE("bench") {
    RunSpec spec;
    spec.scenario = "syn-complex";
    spec.samples = 5;
    spec.c = 1;
    CHECK(bench(spec, {}).empty());
    const auto rows = bench(spec, {100, 200});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].payload_seconds.has_value());
    std::ostringstream os;
    write_bench_csv(rows, os);
    CHECK(os.str().rfind("size,seconds,payload_seconds\n100,", 0) == 0);
}

TEST_CASE("dump") {
    RunSpec spec;
    spec.scenario = "agg-kal";
    spec.samples = 100;
    spec.method = Method::Importance;
    spec.observe = "none";
    const fs::path a = scratch_dir() / "a.csv", b = scratch_dir() / "b.csv";
    dump_samples(spec, a.string());
    dump_samples(spec, b.string());
    const std::string text = slurp(a);
    CHECK(text == slurp(b));
    CHECK(text.rfind("a,o,weight,chain\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 101);

    RunSpec ex;
    ex.scenario = "syn-disc";
    ex.method = Method::Exact;
    ex.n = 1;
    const fs::path c = scratch_dir() / "c.csv";
    dump_samples(ex, c.string());
    CHECK(slurp(c) ==
          "x,o,weight,chain\n0,0,0.25,0\n0,1,0.25,0\n1,1,0.25,0\n1,2,0.25,0\n");
    CHECK_THROWS_AS(dump_samples(ex, (scratch_dir() / "nope" / "c.csv").string()), IoError);
}
