#include "qrc/config.hpp"
#include "qrc/csv.hpp"
#include "qrc/experiment.hpp"
#include "qrc/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

using namespace qrc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::map<std::string, std::string> read_tables(const ResultBundle& bundle) {
  std::map<std::string, std::string> out;
  for (const auto& name : bundle.files) {
    if (name == "manifest.json") continue;
    std::ifstream in(bundle.directory / name, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    out[name] = s.str();
  }
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qrc_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing rejects unknown keys and a missing seed") {
  CHECK_THROWS_AS(parse_config(json{{"kind", "ipc"}}), Error);
  CHECK_NOTHROW(parse_config(json{{"kind", "ipc"}}, 3));
  CHECK_THROWS_AS(parse_config(json{{"kind", "ipc"}, {"seed", 1}, {"colour", "red"}}), Error);
  CHECK_THROWS_AS(parse_config(json{{"kind", "ipc"}, {"seed", 1}, {"run", {{"wash", 3}}}}), Error);
  CHECK_THROWS_AS(parse_config(json{{"kind", "ipc"}, {"seed", 1}, {"noise", {{"p_err", 0.1}, {"gamma", 0.1}}}}),
                  Error);
  CHECK_THROWS_AS(parse_config(json{{"kind", "nope"}, {"seed", 1}}), Error);
  CHECK_THROWS_AS(parse_config(json{{"kind", "ipc"}, {"seed", 1}, {"model", {{"W", -1.0}}}}), Error);

  const auto c = parse_config(json{{"kind", "ipc"},
                                   {"seed", 11},
                                   {"noise", {{"axis", "x"}, {"gamma", 0.001}}},
                                   {"observables", {{"set", "Z+ZZ"}, {"multiplex", 2}}}});
  CHECK(c.run.model.seed == 11);
  CHECK(c.ipc.seed == 11);
  CHECK(c.run.noise.axis == NoiseAxis::x);
  CHECK(c.run.noise.p_err == doctest::Approx(perr_from_gamma(0.001, 10.0 / 50)));
  CHECK(c.run.observables.output_count() == 30);
  CHECK(c.observables.label() == "Z+ZZ@V2");
  CHECK(c.ipc_length() == 10000);
  CHECK(parse_config(json{{"kind", "ipc"}, {"seed", 1}, {"scale", "paper"}}).ipc_length() == 100000);
  CHECK(parse_config(json{{"kind", "ipc"}, {"seed", 11}}, 12).seed == 12);
}

TEST_CASE("config hash is stable and sensitive") {
  const json base{{"kind", "ipc"}, {"seed", 5}, {"model", {{"W", 2.0}}}};
  const auto a = parse_config(base);
  const auto b = parse_config(to_json(a));
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  json reordered = json::parse(R"({"model": {"W": 2.0}, "seed": 5, "kind": "ipc", "output": "elsewhere"})");
  CHECK(config_hash(parse_config(reordered)) == config_hash(a));
  json changed = base;
  changed["model"]["W"] = 2.5;
  CHECK(config_hash(parse_config(changed)) != config_hash(a));
  CHECK(config_hash(parse_config(base, 6)) != config_hash(a));
}

TEST_CASE("sweep expansion and commensurate multiplexing") {
  const auto c = parse_config(json::parse(R"({
    "kind": "ipc", "seed": 1,
    "sweep": {"W": [0, 10], "axes": ["x", "z"], "p_err": [0.001, 0.01],
              "observables": [{"set": "ZZ"}, {"set": "ZZ", "multiplex": 4}]}
  })"));
  const auto cells = expand_cells(c);
  REQUIRE(cells.size() == 16);
  CHECK(cells[0].W == 0.0);
  CHECK(cells[8].W == 10.0);
  CHECK(cells[1].observables.multiplex == 4);
  CHECK(cells[2].p_err == 0.01);
  CHECK(cells[4].axis == NoiseAxis::z);

  const auto rc = cell_run_config(c, cells[1]);
  CHECK(rc.noise.eta == 52);
  CHECK(gamma_from_perr(rc.noise.p_err, 10.0 / 52) == doctest::Approx(gamma_from_perr(0.001, 10.0 / 50)));
  CHECK(cell_run_config(c, cells[0]).noise.eta == 50);
  const NoiseSpec same = commensurate_noise(NoiseSpec{NoiseAxis::x, 0.01, 50}, 5, 10.0);
  CHECK(same.eta == 50);
  CHECK(same.p_err == 0.01);
}

TEST_CASE("Spearman rank correlation") {
  const double x[] = {1, 2, 3, 4, 5};
  const double up[] = {2, 4, 9, 16, 100};
  const double down[] = {5, 4, 3, 2, 1};
  CHECK(spearman(x, up) == doctest::Approx(1.0));
  CHECK(spearman(x, down) == doctest::Approx(-1.0));
  // Ties take the average rank: ranks (1.5, 1.5, 3, 4, 5).
  const double tied[] = {1, 1, 2, 3, 4};
  const double ref[] = {1.5, 1.5, 3, 4, 5};
  CHECK(spearman(tied, x) == doctest::Approx(spearman(ref, x)));
  const double hand = 0.9746794344808963;  // Pearson of (1.5,1.5,3,4,5) with (1..5)
  CHECK(spearman(tied, x) == doctest::Approx(hand));
  const double flat[] = {2, 2, 2, 2, 2};
  CHECK(std::isnan(spearman(flat, x)));
}

TEST_CASE("csv number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 12345.678, 1e300}) CHECK(std::stod(csv::num(v)) == v);
  CHECK(csv::num(0.0) == "0");
  CHECK(csv::num(-0.0) == "0");
  CHECK(csv::num(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(csv::field("a,b") == "\"a,b\"");
}

TEST_CASE("experiment tables are byte-identical across reruns and worker counts") {
  const json traj = json::parse(R"({
    "kind": "trajectories", "seed": 3, "realizations": 2,
    "model": {"n_qubits": 3}, "run": {"washout": 20},
    "noise": {"axis": "z", "p_err": 0.01, "eta": 10},
    "sweep": {"W": [0, 10]}, "trajectory": {"count": 2}
  })");
  const json corr = json::parse(R"({
    "kind": "correlations", "seed": 3,
    "model": {"n_qubits": 3}, "noise": {"eta": 10},
    "correlations": {"washout": 30, "window": 5, "realizations": 2},
    "sweep": {"axes": ["x"], "p_err": [0, 0.01]}
  })");
  const json ipc = json::parse(R"({
    "kind": "ipc", "seed": 3, "realizations": 2,
    "model": {"n_qubits": 3}, "run": {"washout": 200}, "noise": {"eta": 10},
    "observables": {"set": "Z+ZZ"},
    "ipc": {"d_max": 2, "max_delay_linear": 30, "max_delay": 6},
    "write_targets": true
  })");
  for (const json& j : {traj, corr, ipc}) {
    const auto config = parse_config(j);
    const auto first = run_experiment(config, {1, scratch("a")});
    const auto again = run_experiment(config, {1, scratch("b")});
    const auto wide = run_experiment(config, {3, scratch("c")});
    const auto t1 = read_tables(first);
    REQUIRE_FALSE(t1.empty());
    CHECK(t1 == read_tables(again));
    CHECK(t1 == read_tables(wide));
    CHECK(first.manifest["config_hash"] == config_hash(config));
    CHECK(fs::exists(first.directory / "manifest.json"));
    for (const auto& [name, body] : t1) CHECK(body.find("seconds") == std::string::npos);
  }
  const auto other = run_experiment(parse_config(traj, 4), {1, scratch("d")});
  CHECK(read_tables(other) != read_tables(run_experiment(parse_config(traj), {1, scratch("e")})));
  for (const char* n : {"a", "b", "c", "d", "e"}) fs::remove_all(scratch(n));
}

TEST_CASE("IPC cells share inputs and deduplicate identical runs") {
  auto config = parse_config(json::parse(R"({
    "kind": "ipc", "seed": 9, "realizations": 1,
    "model": {"n_qubits": 3}, "run": {"washout": 200}, "noise": {"eta": 10},
    "ipc": {"d_max": 2, "max_delay_linear": 30, "max_delay": 6}
  })"));
  const auto inputs = draw_inputs(config.run.washout + 2 * config.ipc_length(), 9);
  RunConfig rc = config.run;
  rc.length = 2 * config.ipc_length();
  const auto single = run_ipc_cell(rc, inputs, config.ipc, 1, 9);
  const auto both = run_ipc_cells({rc, rc}, inputs, config.ipc, 1, 9, 2);
  REQUIRE(both.size() == 2);
  CHECK(both[0].total.mean == single.total.mean);
  CHECK(both[1].total.mean == single.total.mean);
  const auto direct = ipc_realization(rc, inputs, config.ipc, 9);
  CHECK(direct.total == single.total.mean);
}
