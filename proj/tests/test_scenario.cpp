// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "uwbsync/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

using namespace uwbsync;

namespace {

std::string bundled(const char *name)
{
    return bundled_scenario_dir() + "/" + name;
}

std::string read(const std::string &path)
{
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string replace_line(std::string text, const std::string &from, const std::string &to)
{
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

ScenarioError parse_error(const std::string &text)
{
    try {
        parse_scenario_text(text, "t.scenario");
    } catch (const ScenarioError &e) {
        return e;
    }
    FAIL("expected ScenarioError");
    return ScenarioError("", 0, "", "");
}

} // namespace

TEST_CASE("bundled full-size scenario carries the full-size geometry")
{
    const ScenarioConfig c = parse_scenario(bundled("paper_cm1.scenario"));
    const GeometryParams &g = c.geometry.params();
    CHECK(g.pulse_ns == 0.8);
    CHECK(g.frame_ns == 35.0);
    CHECK(g.chip_ns == 1.0);
    CHECK(g.frames_per_symbol == 32);
    CHECK(g.chips_per_frame == 35);
    CHECK(g.sample_rate_ghz == 50.0);
    CHECK(c.n_interferers == 2);
    CHECK(c.interferer_offsets_db == std::vector<double>{-5.0, -10.0});
    CHECK(c.sync.t_corr_ns == 4.0);
    CHECK(c.trials == 500);
}

TEST_CASE("bundled desk scenario is the CI profile")
{
    const ScenarioConfig c = parse_scenario(bundled("desk.scenario"));
    CHECK(c.geometry == FrameGeometry::desk());
    CHECK(c.trials == 50);
    CHECK(c.m_values == std::vector<int>{8, 32});
}

TEST_CASE("round trip through emit_config")
{
    for (const char *name : {"paper_cm1.scenario", "desk.scenario"}) {
        const ScenarioConfig c = parse_scenario(bundled(name));
        const std::string text = emit_config(c);
        CHECK(parse_scenario_text(text) == c);
        CHECK(emit_config(parse_scenario_text(text)) == text);
    }
    ScenarioConfig odd;
    odd.snr_points_db = {-3.25, std::nullopt, 0.1};
    odd.coarse_threshold_ns = 4.0;
    odd.cm1.single_tap = true;
    odd.sync.window = FineWindow::corr;
    odd.epoch_law = EpochLaw::grid;
    odd.epoch_offset_ns = 1.4;
    odd.master_seed = 18446744073709551615ull;
    CHECK(parse_scenario_text(emit_config(odd)) == odd);
}

TEST_CASE("frame spill is reported against frame_ns with its line")
{
    const std::string text = replace_line(read(bundled("desk.scenario")), "frame_ns = 35", "frame_ns = 30");
    const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(text.find("frame_ns")), '\n'));
    const ScenarioError e = parse_error(text);
    CHECK(e.key() == "frame_ns");
    CHECK(e.line() == line);
    CHECK(e.message().find("frame spill: (N_c-1)*T_c + T_p > T_f") != std::string::npos);
    CHECK(std::string(e.what()).find("t.scenario:" + std::to_string(line) + ":") != std::string::npos);
}

TEST_CASE("missing keys, type mismatches and unknown keys are named")
{
    const std::string desk = read(bundled("desk.scenario"));

    ScenarioError e = parse_error(replace_line(desk, "trials = 50\n", ""));
    CHECK(e.key() == "trials");
    CHECK(e.message().find("missing") != std::string::npos);

    e = parse_error(replace_line(desk, "trials = 50", "trials = fifty"));
    CHECK(e.key() == "trials");
    CHECK(e.line() > 0);

    e = parse_error(replace_line(desk, "delta_ns = 0.2", "delta_ns = 0.2\nbogus = 1"));
    CHECK(e.key() == "bogus");

    e = parse_error(replace_line(desk, "modes = nda, da", "modes = nda, fast"));
    CHECK(e.key() == "modes");

    e = parse_error(replace_line(desk, "seed = 1", "seed = 1\nseed = 2"));
    CHECK(e.key() == "seed");

    e = parse_error(replace_line(desk, "version = 1", "version = 2"));
    CHECK(e.key() == "version");

    e = parse_error(replace_line(desk, "[users]", "[people]"));
    CHECK(e.message().find("unknown section") != std::string::npos);
}

TEST_CASE("invariant violations name the key")
{
    const std::string desk = read(bundled("desk.scenario"));
    CHECK(parse_error(replace_line(desk, "delta_ns = 0.2", "delta_ns = 0.05")).key() == "delta_ns");
    CHECK(parse_error(replace_line(desk, "coarse_step_ns = 4", "coarse_step_ns = 3")).key() == "coarse_step_ns");
    CHECK(parse_error(replace_line(desk, "interferer_offsets_db = -5, -10", "interferer_offsets_db = -5")).key() ==
          "interferer_offsets_db");
    CHECK(parse_error(replace_line(desk, "trials = 50", "trials = 0")).key() == "trials");
    CHECK(parse_error(replace_line(desk, "sample_rate_ghz = 10", "sample_rate_ghz = 8")).key() == "pulse_ns");
    CHECK(parse_error(replace_line(desk, "acquisition_threshold_ns = 0.8", "acquisition_threshold_ns = -1")).key() ==
          "acquisition_threshold_ns");
}

TEST_CASE("missing file is an I/O error")
{
    CHECK_THROWS_AS(parse_scenario("/nonexistent/x.scenario"), IoError);
}
