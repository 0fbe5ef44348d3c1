// Writes the continuous asia fixture: a linear SEM on the asia DAG whose edge families are
// chosen per edge (Gaussian pairs for the unidentifiable edges, a uniform driver for
// the identifiable ones, near-zero weights for the two edges the screen should miss).
#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>

int main(int argc, char** argv) {
  CLI::App app{"asia fixture generator"};
  std::uint64_t seed = 20240601;
  int n = 2000;
  std::string out = "asia.csv";
  app.add_option("--seed", seed);
  app.add_option("--rows", n);
  app.add_option("--out", out);
  CLI11_PARSE(app, argc, argv);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-std::sqrt(3.0), std::sqrt(3.0));
  std::ofstream f(out);
  f << "asia,tub,smoke,lung,bronc,either,xray,dysp\n" << std::setprecision(6);
  for (int k = 0; k < n; ++k) {
    const double asia = g(rng);
    const double tub = 0.8 * asia + 0.6 * g(rng);
    const double smoke = g(rng);
    const double lung = 0.7 * smoke + 0.7 * g(rng);
    const double bronc = 0.7 * smoke + 0.7 * g(rng);
    const double either = u(rng) + 0.02 * tub + 0.02 * lung;
    const double xray = either + 0.5 * g(rng);
    const double dysp = either + bronc + 0.5 * g(rng);
    f << asia << ',' << tub << ',' << smoke << ',' << lung << ',' << bronc << ',' << either << ',' << xray << ','
      << dysp << '\n';
  }
}
