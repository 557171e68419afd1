#include "qrc/reservoir.hpp"
#include "qrc/rng.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>

using namespace qrc;

namespace {

ComplexMatrix ket_projector(Complex a, Complex b) {
  ComplexVector v(2);
  v << a, b;
  return v * v.adjoint();
}

RunConfig small_config(int n = 3) {
  RunConfig c;
  c.model.n_qubits = n;
  c.model.seed = 3;
  c.washout = 20;
  c.length = 30;
  c.observables = ObservableSet::named("Z+ZZ", n);
  c.noise.eta = 20;
  return c;
}

}  // namespace

TEST_CASE("input encodings") {
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(max_abs(encode_input(0.5, Encoding::mixed_z).matrix() - ComplexMatrix::Identity(2, 2) / 2.0) < 1e-15);
  CHECK(max_abs(encode_input(0.3, Encoding::mixed_z).matrix() - ket_projector(1, 0) * 0.7 - ket_projector(0, 1) * 0.3) < 1e-15);
  CHECK(max_abs(encode_input(0.0, Encoding::pure_z).matrix() - ket_projector(1, 0)) < 1e-15);
  CHECK(max_abs(encode_input(1.0, Encoding::mixed_x).matrix() - ket_projector(r, r)) < 1e-15);
  for (double s : {0.0, 0.2, 0.5, 0.9, 1.0}) {
    const double a = std::cos(std::numbers::pi * s / 2), b = std::sin(std::numbers::pi * s / 2);
    CHECK(max_abs(encode_input(s, Encoding::pure_z).matrix() - ket_projector(a, b)) < 1e-15);
    // xi = cos |-> + sin |+>
    CHECK(max_abs(encode_input(s, Encoding::pure_x).matrix() - ket_projector(a * r + b * r, -a * r + b * r)) < 1e-15);
    CHECK(max_abs(encode_input(s, Encoding::mixed_x).matrix() -
                  ((1 - s) * ket_projector(r, -r) + s * ket_projector(r, r))) < 1e-15);
    for (Encoding e : {Encoding::mixed_z, Encoding::pure_z, Encoding::mixed_x, Encoding::pure_x}) {
      CHECK_NOTHROW(encode_input(s, e).validate());
    }
  }
  CHECK_THROWS_AS(encode_input(1.1, Encoding::mixed_z), Error);
  CHECK_THROWS_AS(encode_input(-0.1, Encoding::pure_x), Error);
  CHECK(parse_encoding("pure_x") == Encoding::pure_x);
  CHECK_THROWS_AS(parse_encoding("pure_y"), Error);
}

TEST_CASE("erase-and-write injection") {
  std::mt19937_64 rng(1);
  const auto old_input = test::random_state(1, rng);
  const auto rest = test::random_state(2, rng);
  const auto fresh = test::random_state(1, rng);
  CHECK(max_abs(inject_input(old_input.tensor(rest), fresh).matrix() - fresh.tensor(rest).matrix()) < 1e-15);
  const auto rho = test::random_state(4, rng);
  const auto out = inject_input(rho, fresh);
  CHECK(max_abs(partial_trace(out, 0).matrix() - partial_trace(rho, 0).matrix()) < 1e-15);
  CHECK(std::abs(out.matrix().trace() - 1.0) < 1e-14);
  CHECK_THROWS_AS(inject_input(rho, rest), Error);
}

TEST_CASE("observable sets") {
  CHECK(ObservableSet::named("Z", 5).size() == 5);
  CHECK(ObservableSet::named("ZZ", 5).size() == 10);
  CHECK(ObservableSet::named("Z+ZZ", 5).size() == 15);
  CHECK(ObservableSet::named("XXXYYXYY", 5).size() == 40);
  CHECK(ObservableSet::named("LOCAL12", 5).size() == 15 + 90);
  const auto zzzx = ObservableSet::named("ZZ+ZX", 5);
  REQUIRE(zzzx.size() == 10);
  CHECK(zzzx.observables[0].str() == "ZZIII");
  CHECK(zzzx.observables[4].str() == "ZIZII");
  CHECK(zzzx.observables[5].str() == "ZXIII");
  CHECK(zzzx.observables[9].str() == "ZIXII");
  const auto mux = ObservableSet::named("ZZ", 5, 4);
  CHECK(mux.output_count() == 40);
  CHECK(mux.column_names()[10] == "ZZIII@2/4");
  CHECK_THROWS_AS(ObservableSet::named("QQ", 5), Error);
  CHECK_THROWS_AS(ObservableSet::custom({PauliString("III")}), Error);
}

TEST_CASE("measured expectations") {
  const auto zset = ObservableSet::named("Z", 5);
  for (double v : measure_observables(DensityMatrix::maximally_mixed(5), ObservableSet::named("LOCAL12", 5))) {
    CHECK(std::abs(v) < 1e-15);
  }
  for (double v : measure_observables(DensityMatrix::basis_state(5, 0), zset)) CHECK(v == doctest::Approx(1.0));
  ComplexVector plus = ComplexVector::Constant(32, 1.0 / std::sqrt(32.0));
  std::vector<PauliString> xx;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) xx.push_back(PauliString::on(5, {{i, Pauli::X}, {j, Pauli::X}}));
  for (double v : measure_observables(DensityMatrix::pure(plus), ObservableSet::custom(xx))) {
    CHECK(v == doctest::Approx(1.0));
  }
  std::mt19937_64 rng(2);
  const auto rho = test::random_state(3, rng);
  const auto all = ObservableSet::named("LOCAL12", 3);
  const auto values = measure_observables(rho, all);
  for (std::size_t k = 0; k < all.size(); ++k) {
    const double direct = (test::pauli_kron(all.observables[k].str()) * rho.matrix()).trace().real();
    CHECK(values[k] == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("decoupled input qubit returns to the encoded marginal") {
  RunConfig c = small_config(3);
  const auto h = make_hamiltonian(RealMatrix::Zero(3, 3), {0.7, 1.1, 0.4}, 0.0);
  const std::vector<double> inputs(c.washout + c.length, 0.5);
  RunOptions options;
  options.state_log = StepWindow{0, inputs.size()};
  for (Propagation prop : {Propagation::transfer, Propagation::dense}) {
    c.propagation = prop;
    const auto result = Reservoir(c, h).run(inputs, options);
    for (const auto& s : result.states) {
      CHECK(max_abs(single_qubit_marginal(s.state, 0).matrix() - ComplexMatrix::Identity(2, 2) / 2.0) < 1e-12);
    }
  }
}

TEST_CASE("transfer and dense engines agree") {
  const auto inputs = draw_inputs(50, 9);
  for (Encoding enc : {Encoding::mixed_z, Encoding::pure_z, Encoding::mixed_x, Encoding::pure_x}) {
    for (NoiseAxis axis : {NoiseAxis::none, NoiseAxis::x, NoiseAxis::z}) {
      for (int V : {1, 2}) {
        RunConfig c = small_config(3);
        c.encoding = enc;
        c.noise.axis = axis;
        c.noise.p_err = axis == NoiseAxis::none ? 0.0 : 0.02;
        c.observables = ObservableSet::named("LOCAL12", 3, V);
        c.model.epsilon = 0.05;
        c.initial = InitialState::all_zero;
        RunOptions options;
        options.state_log = StepWindow{40, 3};
        options.trajectory = StepWindow{45, 2};
        c.propagation = Propagation::transfer;
        const auto a = run_reservoir(c, inputs, options);
        c.propagation = Propagation::dense;
        const auto b = run_reservoir(c, inputs, options);
        CHECK((a.readout.values - b.readout.values).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(max_abs(a.final_state.matrix() - b.final_state.matrix()) < 1e-10);
        REQUIRE(a.states.size() == 3);
        REQUIRE(b.states.size() == 3);
        for (int k = 0; k < 3; ++k) CHECK(max_abs(a.states[k].state.matrix() - b.states[k].state.matrix()) < 1e-10);
        REQUIRE(a.trajectory.size() == b.trajectory.size());
        for (std::size_t k = 0; k < a.trajectory.size(); ++k) {
          CHECK(a.trajectory[k].value == doctest::Approx(b.trajectory[k].value).epsilon(1e-10));
        }
      }
    }
  }
}

TEST_CASE("readout layout and multiplexing") {
  RunConfig c = small_config(3);
  const auto inputs = draw_inputs(c.washout + c.length, 4);
  const auto plain = run_reservoir(c, inputs).readout;
  CHECK(plain.rows() == static_cast<Eigen::Index>(c.length));
  CHECK(plain.first_time == c.washout + 1);
  CHECK(plain.values.cwiseAbs().maxCoeff() <= 1.0);
  CHECK((multiplex_readout(c, inputs, 1).values - plain.values).cwiseAbs().maxCoeff() == 0.0);
  const auto two = multiplex_readout(c, inputs, 2);
  CHECK(two.cols() == 2 * plain.cols());
  CHECK((two.values.rightCols(plain.cols()) - plain.values).cwiseAbs().maxCoeff() < 1e-12);

  c.noise = NoiseSpec{NoiseAxis::x, 0.01, 50};
  c.observables = ObservableSet::named("ZZ", 3, 4);
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK_THROWS_AS(run_reservoir(small_config(3), std::vector<double>(3, 0.5)), Error);
}

TEST_CASE("runs are deterministic") {
  RunConfig c = small_config(4);
  c.noise = NoiseSpec{NoiseAxis::z, 0.01, 20};
  const auto inputs = draw_inputs(c.washout + c.length, 5);
  const auto a = run_reservoir(c, inputs).readout;
  const auto b = run_reservoir(c, inputs).readout;
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("readout noise statistics") {
  ReadoutMatrix x;
  x.values = RealMatrix::Zero(1000, 1000);
  const auto y = add_readout_noise(x, 0.001, 12);
  CHECK(y.noisy);
  const double mean = y.values.mean();
  const double sd = std::sqrt((y.values.array() - mean).square().sum() / (y.values.size() - 1.0));
  CHECK(std::abs(y.values.topRows(100).mean()) < 1e-4);
  CHECK(sd > 0.00099);
  CHECK(sd < 0.00101);
  CHECK((add_readout_noise(x, 0.0, 12).values - x.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK((add_readout_noise(x, 0.001, 12).values - y.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(add_readout_noise(x, -1.0, 1), Error);
}

TEST_CASE("echo state property on a short run") {
  RunConfig c = small_config(5);
  c.washout = 300;
  c.length = 20;
  c.observables = ObservableSet::named("ZZ", 5);
  const auto inputs = draw_inputs(c.washout + c.length, 6);
  c.initial = InitialState::maximally_mixed;
  const auto a = run_reservoir(c, inputs).readout;
  c.initial = InitialState::all_zero;
  const auto b = run_reservoir(c, inputs).readout;
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("stationary statistics of local observables") {
  RunConfig c = small_config(5);
  c.washout = 200;
  c.length = 300;
  const auto inputs = draw_inputs(c.washout + c.length, 7);
  const auto stats = stationary_observable_stats(c, inputs, 2);
  CHECK(stats.size() == 105);
  for (const auto& s : stats) {
    const PauliString p(s.observable);
    if (p.weight() == 1 && (p.x_mask() != 0)) CHECK(s.mean_abs < 1e-6);  // local X, Y
  }

  // Frozen register: no couplings, no fields, maximally mixed, every injection I/2.
  RunConfig frozen = small_config(3);
  frozen.washout = 5;
  frozen.length = 10;
  const auto h = make_hamiltonian(RealMatrix::Zero(3, 3), {0.0, 0.0, 0.0}, 0.0);
  const std::vector<double> half(15, 0.5);
  const auto readout = Reservoir(frozen, h).run(half).readout;
  CHECK(readout.values.cwiseAbs().maxCoeff() < 1e-15);
}
