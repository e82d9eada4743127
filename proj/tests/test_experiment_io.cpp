#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fkdv/errors.hpp"
#include "fkdv/experiment_io.hpp"
#include "fkdv/rng.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace fkdv;
namespace fs = std::filesystem;

namespace {

const char* kMinimalConfig = R"(
# flagship-style configuration
[model]
alpha = 0.75
seed = 20240811

[grid]
n_points = 2048
half_length = 94.2477796076938

[solver]
dt = 0.001
t_final = 5.0

[ladder]
m = 2

[window]
x0 = 0.0
epsilon = 0.5
b = 2.5
tau = 2.5
v = 1.0
)";

fs::path temp_dir() {
    auto dir = fs::temp_directory_path() / "fkdv_io_test";
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("config parsing") {
    SUBCASE("minimal valid config is accepted with defaults") {
        const auto cfg = parse_config(kMinimalConfig);
        CHECK(cfg.alpha == doctest::Approx(0.75));
        CHECK(cfg.n_points == 2048);
        CHECK(cfg.t_final == doctest::Approx(5.0));
        CHECK(cfg.scheme == "etdrk4");
        CHECK(cfg.dealias);
        REQUIRE(cfg.windows.size() == 1);
        CHECK(cfg.windows[0].b == doctest::Approx(2.5));
        // derived regularity thresholds
        CHECK(cfg.s_alpha() == doctest::Approx(2.0 - 0.75 / 2.0));
        CHECK(cfg.s_of_alpha() == doctest::Approx(1.5 - 3.0 * 0.75 / 8.0));
    }
    SUBCASE("tau <= 4 epsilon is rejected citing the rule") {
        std::string text = kMinimalConfig;
        text.replace(text.find("tau = 2.5"), 9, "tau = 1.5");
        try {
            parse_config(text);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("tau > 4*epsilon") != std::string::npos);
        }
    }
    SUBCASE("b < 5 epsilon is rejected citing the rule") {
        std::string text = kMinimalConfig;
        text.replace(text.find("b = 2.5"), 7, "b = 2.0");
        try {
            parse_config(text);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("b >= 5*epsilon") != std::string::npos);
        }
    }
    SUBCASE("alpha outside (0,1) is rejected") {
        std::string text = kMinimalConfig;
        text.replace(text.find("alpha = 0.75"), 12, "alpha = 1.25");
        try {
            parse_config(text);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("0 < alpha < 1") != std::string::npos);
        }
    }
    SUBCASE("syntax errors carry the line number") {
        try {
            parse_config("[model]\nalpha 0.75\n");
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SUBCASE("multiple windows accumulate") {
        std::string text = kMinimalConfig;
        text += "\n[window]\nx0 = 3.0\nepsilon = 0.1\nb = 1.0\ntau = 0.5\nv = 0.0\n";
        const auto cfg = parse_config(text);
        CHECK(cfg.windows.size() == 2);
        CHECK(cfg.windows[1].x0 == doctest::Approx(3.0));
    }
}

TEST_CASE("config serialization round-trips losslessly") {
    auto cfg = parse_config(kMinimalConfig);
    cfg.dt = 0.0012345678901234567; // awkward mantissa
    cfg.initial_data.kind = "one_sided";
    cfg.initial_data.gamma = 1.3;
    const std::string text = serialize_config(cfg);
    const auto back = parse_config(text);
    CHECK(config_equal(cfg, back));
    CHECK(serialize_config(back) == text);
}

TEST_CASE("output directory override") {
    OutputSpec spec;
    spec.directory = "from_config";
    unsetenv("FKDV_OUTPUT_DIR");
    CHECK(resolve_output_dir(spec) == fs::path("from_config"));
    setenv("FKDV_OUTPUT_DIR", "/tmp/fkdv_override", 1);
    CHECK(resolve_output_dir(spec) == fs::path("/tmp/fkdv_override"));
    unsetenv("FKDV_OUTPUT_DIR");
}

TEST_CASE("snapshot round trip") {
    const auto dir = temp_dir();
    auto rng = substream(99, "snapshot");
    auto g = make_grid(256, 12.0);
    Field f = random_band_limited(g, 64, rng);
    SolverState st{0.625, f, 40, {}, 0.0, 0.0, false};
    const Snapshot snap = make_snapshot(st, 0.6);
    const auto path = dir / "roundtrip.fkdv";
    write_snapshot(snap, path);
    const Snapshot back = read_snapshot(path);
    CHECK(back.version == 1);
    CHECK(back.n_points == 256);
    CHECK(back.half_length == 12.0);
    CHECK(back.alpha == 0.6);
    CHECK(back.t == 0.625);
    CHECK(back.step_count == 40);
    REQUIRE(back.values.size() == f.size());
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(back.values[i] == f.value(i)); // bitwise
    const SolverState restored = state_from_snapshot(back);
    CHECK(restored.t == st.t);
    CHECK(restored.step_count == 40);
}

TEST_CASE("snapshot format errors") {
    const auto dir = temp_dir();
    SUBCASE("wrong magic") {
        const auto path = dir / "badmagic.fkdv";
        std::ofstream(path, std::ios::binary) << "NOPE" << std::string(60, '\0');
        CHECK_THROWS_AS(read_snapshot(path), FormatError);
    }
    SUBCASE("truncated payload") {
        auto g = make_grid(64, 5.0);
        SolverState st{0.0, zero_field(g), 0, {}, 0.0, 0.0, false};
        const auto path = dir / "trunc.fkdv";
        write_snapshot(make_snapshot(st, 0.5), path);
        // chop the last 16 bytes
        const auto size = fs::file_size(path);
        fs::resize_file(path, size - 16);
        CHECK_THROWS_AS(read_snapshot(path), FormatError);
    }
    SUBCASE("unsupported version") {
        const auto path = dir / "badver.fkdv";
        std::string blob = "FKDV";
        blob.push_back(9); // version 9 LE
        blob.append(3, '\0');
        blob.append(48, '\0');
        std::ofstream(path, std::ios::binary) << blob;
        CHECK_THROWS_AS(read_snapshot(path), FormatError);
    }
}

TEST_CASE("restart reproduces the uninterrupted trajectory bitwise") {
    const auto dir = temp_dir();
    auto g = make_grid(256, 20.0);
    Field u0 = sample_field(g, [](double x) { return std::exp(-x * x / 4.0); });
    SolverConfig cfg;
    cfg.alpha = 0.75;
    cfg.dt = 1e-2;
    cfg.t_final = 2.0;
    cfg.output_cadence = 10;

    // uninterrupted run to T
    const SolverState full = run(u0, cfg);

    // run to T/2, snapshot, restore, continue to T
    SolverConfig half_cfg = cfg;
    half_cfg.t_final = 1.0;
    const SolverState mid = run(u0, half_cfg);
    const auto path = dir / "mid.fkdv";
    write_snapshot(make_snapshot(mid, cfg.alpha), path);
    SolverState resumed = state_from_snapshot(read_snapshot(path));
    const SolverState cont = resume_run(std::move(resumed), cfg);

    CHECK(cont.step_count == full.step_count);
    REQUIRE(cont.u.size() == full.u.size());
    for (std::size_t i = 0; i < full.u.size(); ++i)
        CHECK(cont.u.value(i) == full.u.value(i)); // bitwise
}

TEST_CASE("csv writer") {
    const auto dir = temp_dir();
    const auto path = dir / "series.csv";
    write_csv(path, {0.0, 0.5, 1.0},
              {{"w0_e2.000", {1.0, 2.0, 3.0}}, {"w0_e2.375", {4.0, 5.0, 6.0}}});
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,w0_e2.000,w0_e2.375");
    std::string row;
    std::getline(in, row);
    CHECK(row.substr(0, 2) == "0,");
}

TEST_CASE("jsonl writer appends one object per line") {
    const auto dir = temp_dir();
    const auto path = dir / "report.jsonl";
    JsonlWriter w(path);
    w.write_line("{\"a\":1}");
    w.write_line("{\"b\":2}");
    std::ifstream in(path);
    std::string l1, l2;
    std::getline(in, l1);
    std::getline(in, l2);
    CHECK(l1 == "{\"a\":1}");
    CHECK(l2 == "{\"b\":2}");
}
