#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nrsense/commands.hpp"
#include "nrsense/errors.hpp"
#include "nrsense/scenario.hpp"

using namespace nrsense;
using nlohmann::json;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("nrsense_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

Scenario small_scenario() {
  Scenario s;
  s.users = {UserConfig{3, 10.0, 5.0, 0.01, 1}, UserConfig{4, 7.0, 2.0, 0.0, 2}};
  s.pf_grid = GridSpec{1e-3, 1.0, 6};
  s.methods = {"series", "quadrature"};
  s.k = 60;
  return s;
}

} // namespace

TEST_CASE("grid spec parsing") {
  const GridSpec g = GridSpec::parse("1e-4:1:50");
  CHECK(g.min == 1e-4);
  CHECK(g.max == 1.0);
  CHECK(g.count == 50);
  CHECK(GridSpec::parse(g.str()).min == g.min);
  CHECK(g.values().size() == 50);
  CHECK_THROWS_AS(GridSpec::parse("1e-4:1"), InputError);
  CHECK_THROWS_AS(GridSpec::parse("1e-4:1:5:6"), InputError);
  CHECK_THROWS_AS(GridSpec::parse("a:1:5"), InputError);
  CHECK_THROWS_AS(GridSpec::parse("1e-4:1:2.5"), InputError);
  CHECK_THROWS_AS((GridSpec{0.0, 1.0, 5}.values()), DomainError);
  CHECK_THROWS_AS((GridSpec{0.1, 2.0, 5}.values()), DomainError);
  CHECK_THROWS_AS((GridSpec{0.5, 0.5, 3}.values()), DomainError);
  CHECK((GridSpec{0.5, 0.5, 1}.values()) == std::vector<double>{0.5});
}

TEST_CASE("list splitting") {
  CHECK(split_list("series, quadrature,,monte_carlo ") ==
        std::vector<std::string>{"series", "quadrature", "monte_carlo"});
  CHECK(split_list("").empty());
}

TEST_CASE("default scenario") {
  const Scenario s;
  CHECK(s.users.size() == 3);
  CHECK(s.users[0] == UserConfig{3, 10.0, 5.0, 0.01, 1});
  CHECK(s.pf_grid.count == 50);
  CHECK(s.k == 500);
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("scenario JSON round trip") {
  Scenario s = small_scenario();
  s.samples = 12345;
  s.seed = 99;
  s.workers = 3;
  s.out = "curve.csv";
  const Scenario back = Scenario::from_json(json::parse(s.to_json().dump()));
  CHECK(back.users == s.users);
  CHECK(back.pf_grid.str() == s.pf_grid.str());
  CHECK(back.methods == s.methods);
  CHECK(back.k == s.k);
  CHECK(back.samples == s.samples);
  CHECK(back.seed == s.seed);
  CHECK(back.workers == s.workers);
  CHECK(back.out == s.out);
}

TEST_CASE("scenario JSON validation") {
  CHECK_THROWS_AS(Scenario::from_json(json::array()), InputError);
  CHECK_THROWS_AS(Scenario::from_json(json{{"colour", 1}}), InputError);
  CHECK_THROWS_AS(Scenario::from_json(json{{"users", json::array({json{{"m", 3}}})}}), InputError);
  CHECK_THROWS_AS(Scenario::from_json(json{{"k", "many"}}), InputError);
  CHECK(Scenario::from_json(json{{"methods", "series,monte_carlo"}}).methods ==
        std::vector<std::string>{"series", "monte_carlo"});

  Scenario s;
  s.methods = {"magic"};
  CHECK_THROWS_AS(s.validate(), InputError);
  s.methods = {"series", "series"};
  CHECK_THROWS_AS(s.validate(), InputError);
  s = Scenario{};
  s.users.clear();
  CHECK_THROWS_AS(s.validate(), InputError);
  s = Scenario{};
  s.users[1].pe = 0.7;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s = Scenario{};
  s.k = 0;
  CHECK_THROWS_AS(s.validate(), DomainError);
}

TEST_CASE("scenario files") {
  const auto dir = scratch_dir("files");
  {
    std::ofstream(dir / "ok.json") << R"({"users": [{"n": 2, "snr_db": 3, "u": 4, "pe": 0.1, "L": 2}], "k": 10})";
    std::ofstream(dir / "bad.json") << "{ not json";
  }
  const Scenario s = load_scenario(dir / "ok.json");
  REQUIRE(s.users.size() == 1);
  CHECK(s.users[0] == UserConfig{2, 3.0, 4.0, 0.1, 2});
  CHECK(s.k == 10);
  CHECK_THROWS_AS(load_scenario(dir / "bad.json"), InputError);
  CHECK_THROWS_AS(load_scenario(dir / "missing.json"), InputError);
}

TEST_CASE("decimal formatting round-trips") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1e-6) == "9.9999999999999995e-07");
  for (double v : {0.1, 1.0 / 3.0, 2.4951522541490113e-31, 29.588298445074425, 1e300}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    CHECK(format_double(v).find(',') == std::string::npos);
  }
}

TEST_CASE("ROC CSV schema") {
  const Scenario s = small_scenario();
  const RocTable table = compute_roc(s);
  const auto rows = parse_csv(format_roc_csv(table));
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == std::vector<std::string>{"qf", "qm_series", "qd_series", "qm_quadrature", "qd_quadrature",
                                            "lambda_1", "lambda_2"});
  for (std::size_t r = 1; r < rows.size(); ++r) {
    REQUIRE(rows[r].size() == 7);
    const auto& pt = table.curves[1].points[r - 1];
    CHECK(std::stod(rows[r][0]) == pt.q_f);
    CHECK(std::stod(rows[r][3]) == pt.q_m);
    CHECK(std::stod(rows[r][4]) == pt.q_d);
    CHECK(std::stod(rows[r][5]) == threshold_for_pf(5.0, pt.pf_target));
    CHECK(std::stod(rows[r][6]) == threshold_for_pf(2.0, pt.pf_target));
    CHECK(std::abs(std::stod(rows[r][1]) + std::stod(rows[r][2]) - 1.0) <= 1e-12);
  }
  CHECK(roc_csv(s) == format_roc_csv(table));
}

TEST_CASE("outputs and sidecar") {
  const auto dir = scratch_dir("outputs");
  Scenario s = small_scenario();
  s.out = (dir / "roc.csv").string();
  const std::string csv = roc_csv(s);
  std::ostringstream console;
  write_outputs(s, "roc", csv, console);
  CHECK(console.str().empty());

  std::ifstream in(dir / "roc.csv", std::ios::binary);
  const std::string written((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(written == csv);

  std::ifstream meta_in(dir / "roc.csv.meta.json");
  const json meta = json::parse(meta_in);
  CHECK(meta.at("command") == "roc");
  const Scenario echoed = Scenario::from_json(meta.at("scenario"));
  CHECK(echoed.users == s.users);
  CHECK(echoed.k == s.k);

  s.out = "-";
  std::ostringstream stdout_capture;
  write_outputs(s, "roc", csv, stdout_capture);
  CHECK(stdout_capture.str() == csv);

  s.out = (dir / "missing" / "roc.csv").string();
  CHECK_THROWS_AS(write_outputs(s, "roc", csv, console), InputError);
}

TEST_CASE("Monte Carlo CSV") {
  Scenario s;
  s.users = {UserConfig{3, 10.0, 5.0, 0.01, 1}};
  s.pf_grid = GridSpec{0.1, 0.1, 1};
  s.samples = 20'000;
  const auto rows = parse_csv(mc_csv(s));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"pf_target", "qf", "qf_se", "qm", "qm_se"});
  CHECK(std::abs(std::stod(rows[1][1]) - (0.1 * 0.99 + 0.9 * 0.01)) <= 5.0 * std::stod(rows[1][2]));
}
