// Prints the entanglement witnesses of a one-axis-twisted coherent spin state.
#include <cstdlib>
#include <iostream>

#include "qmetro/qmetro.hpp"

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 100;
  const double tau = argc > 2 ? std::atof(argv[2]) : 1.0 / std::sqrt(static_cast<double>(n));

  const qmetro::DickeState psi = qmetro::twisted_state(qmetro::Spin::from_particles(n), tau);
  const auto report = qmetro::witness_report(psi, qmetro::Direction::unit_y());
  std::cout << qmetro::to_json(report).dump(2) << '\n';
  std::cout << "closed-form chi2: " << qmetro::chi2_oat_analytic(n, tau) << '\n';
}
