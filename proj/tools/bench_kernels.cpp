// Timing comparison of the serial reference kernels against the OpenMP
// paths. Both produce bit-identical results; this reports wall time only.
//
//   ./bench_kernels [samples]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "concfn/concentration.hpp"
#include "concfn/gap.hpp"
#include "concfn/inverse.hpp"
#include "concfn/smoothing.hpp"

using namespace concfn;

namespace {

template <typename F>
double time_of(F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

void report(const char* name, double serial, double openmp) {
    std::printf("%-28s serial %8.3f s   openmp %8.3f s   speedup %.2fx\n", name, serial,
                openmp, openmp > 0 ? serial / openmp : 0.0);
}

}  // namespace

int main(int argc, char** argv) {
    const std::uint64_t samples = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 400000;

    // Monte Carlo ball scan.
    {
        auto law = weighted_sum_law(WeightVector::ones(24), DiscreteDist::rademacher());
        MCConfig cfg;
        cfg.sample_count = samples;
        cfg.seed = 7;
        double v1 = 0, v2 = 0;
        cfg.exec = ExecMode::serial;
        const double ts = time_of([&] { v1 = q_monte_carlo(dist_sampler(law), 2.0, cfg).value; });
        cfg.exec = ExecMode::openmp;
        const double tp = time_of([&] { v2 = q_monte_carlo(dist_sampler(law), 2.0, cfg).value; });
        if (v1 != v2) std::printf("MISMATCH in q_monte_carlo\n");
        report("q_monte_carlo", ts, tp);
    }

    // Compound Poisson batch sampling.
    {
        auto law = make_smoothing_law(WeightVector::ones(16), 2.0);
        std::vector<double> a, b;
        const double ts = time_of([&] { a = sample_h_batch(law, 11, samples, ExecMode::serial); });
        const double tp = time_of([&] { b = sample_h_batch(law, 11, samples, ExecMode::openmp); });
        if (a != b) std::printf("MISMATCH in sample_h_batch\n");
        report("sample_h_batch", ts, tp);
    }

    // Candidate-generator search.
    {
        Xoshiro256 rng(3);
        std::vector<double> coeffs;
        for (int k = 0; k < 28; ++k) coeffs.push_back(std::round(rng.uniform(-40, 40)) / 4);
        auto w = levy_base_measure(WeightVector::make1(coeffs));
        BetaConfig cfg;
        Rational v1, v2;
        cfg.exec = ExecMode::serial;
        const double ts = time_of([&] { v1 = beta(w, 2, 9, 0.25, cfg).value; });
        cfg.exec = ExecMode::openmp;
        const double tp = time_of([&] { v2 = beta(w, 2, 9, 0.25, cfg).value; });
        if (v1 != v2) std::printf("MISMATCH in beta\n");
        report("beta search", ts, tp);
    }

    // Progression fitting.
    {
        PlantSpec spec;
        spec.rank = 2;
        spec.generators = {{1.0}, {1357.0}};
        spec.limits = {3.0, 2.0};
        spec.n = 400;
        spec.noise = 1e-5;
        spec.outlier_fraction = 0.05;
        auto inst = plant(spec, 5);
        FitConfig cfg;
        cfg.rank_cap = 2;
        cfg.volume_cap = 200;
        int c1 = 0, c2 = 0;
        cfg.exec = ExecMode::serial;
        const double ts =
            time_of([&] { c1 = fit_gap(inst.a, 1e-3, 20, cfg).coverage.covered_count; });
        cfg.exec = ExecMode::openmp;
        const double tp =
            time_of([&] { c2 = fit_gap(inst.a, 1e-3, 20, cfg).coverage.covered_count; });
        if (c1 != c2) std::printf("MISMATCH in fit_gap\n");
        report("fit_gap", ts, tp);
    }

    return 0;
}
