#include <doctest.h>

#include <cmath>

#include "asyncqp/problem_gen.hpp"
#include "asyncqp/qp_model.hpp"

using namespace asyncqp;

TEST_CASE("even_partition") {
    BlockPartition paper = even_partition(100, 25);
    CHECK(paper.num_blocks() == 25);
    for (int i = 0; i < 25; ++i) CHECK(paper.size(i) == 4);

    BlockPartition odd = even_partition(5, 2);
    CHECK(odd.size(0) == 3);
    CHECK(odd.size(1) == 2);

    BlockPartition ones = even_partition(4, 4);
    for (int i = 0; i < 4; ++i) CHECK(ones.size(i) == 1);

    CHECK_THROWS_AS(even_partition(3, 4), std::invalid_argument);
    CHECK_THROWS_AS(even_partition(3, 0), std::invalid_argument);
}

TEST_CASE("random_orthogonal is orthogonal and deterministic") {
    for (int n : {2, 5, 20}) {
        const Matrix u = random_orthogonal(n, 42);
        const Matrix gram = u.transpose() * u;
        CHECK(spectral_norm(Matrix(gram - Matrix::Identity(n, n))) <= 1e-10);
        const Matrix u2 = random_orthogonal(n, 42);
        CHECK((u - u2).cwiseAbs().maxCoeff() == 0.0);
        const Matrix u3 = random_orthogonal(n, 43);
        CHECK((u - u3).cwiseAbs().maxCoeff() > 0.0);
    }
}

TEST_CASE("generate_q isotropic case is exact") {
    GenSpec spec;
    spec.n = 6;
    spec.cond = 1.0;
    spec.norm2 = 2.5;
    spec.seed = 9;
    const Matrix q = generate_q(spec);
    CHECK((q - Matrix(2.5 * Matrix::Identity(6, 6))).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("generate_q hits the spectral targets") {
    GenSpec small;
    small.n = 2;
    small.norm2 = 4.0;
    small.cond = 4.0;
    small.seed = 1;
    const Vector evs = symmetric_eigenvalues(generate_q(small));
    CHECK(evs(1) == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(evs(0) == doctest::Approx(1.0).epsilon(1e-6));

    for (int n : {4, 20, 100}) {
        for (std::uint64_t seed = 0; seed < (n == 100 ? 3u : 20u); ++seed) {
            GenSpec spec;
            spec.n = n;
            spec.norm2 = 100.0;
            spec.cond = 100.0;
            spec.seed = seed;
            spec.spectrum = seed % 2 ? SpectrumLaw::Uniform : SpectrumLaw::LogUniform;
            const SpectralInfo info = spectral_exact(generate_q(spec));
            CHECK(info.norm2 == doctest::Approx(100.0).epsilon(1e-6));
            CHECK(info.cond == doctest::Approx(100.0).epsilon(1e-6));
        }
    }
}

TEST_CASE("generated problems pass construction invariants") {
    GenSpec spec;
    spec.n = 30;
    spec.num_agents = 7;
    spec.norm2 = 50.0;
    spec.cond = 500.0;
    spec.r_norm = 0.3;
    spec.seed = 77;
    QuadraticProblem prob = generate_problem(spec);  // ctor enforces symmetry + PD
    CHECK(prob.num_agents() == 7);
    CHECK(prob.partition().size(0) == 5);  // 30 = 7*4 + 2 -> first two blocks get 5
    CHECK(prob.partition().size(2) == 4);
    CHECK(prob.r().norm() == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("generate_r") {
    GenSpec spec;
    spec.n = 100;
    spec.norm2 = 1.0;
    spec.cond = 1.0;
    spec.seed = 4;

    spec.r_norm = 0.0;
    CHECK(generate_r(spec).norm() == 0.0);

    spec.r_norm = 0.105;
    const Vector r = generate_r(spec);
    CHECK(std::abs(r.norm() - 0.105) <= 1e-12);
    CHECK((generate_r(spec) - r).cwiseAbs().maxCoeff() == 0.0);  // deterministic

    spec.r_explicit = {1.0, 1.0};
    spec.n = 2;
    const Vector rexp = generate_r(spec);
    CHECK(rexp(0) == 1.0);
    CHECK(rexp(1) == 1.0);
}

TEST_CASE("generator validation") {
    GenSpec bad;
    bad.n = 1;
    bad.cond = 4.0;  // 1x1 cannot be ill-conditioned
    CHECK_THROWS_AS(generate_q(bad), std::invalid_argument);

    GenSpec negative;
    negative.n = 4;
    negative.norm2 = -1.0;
    CHECK_THROWS_AS(generate_q(negative), std::invalid_argument);

    GenSpec blocks;
    blocks.n = 4;
    blocks.block_sizes = {2, 1};  // sums to 3, not 4
    CHECK_THROWS_AS(generate_problem(blocks), std::invalid_argument);

    GenSpec wrong_r;
    wrong_r.n = 3;
    wrong_r.r_explicit = {1.0};
    CHECK_THROWS_AS(generate_r(wrong_r), std::invalid_argument);
}

TEST_CASE("determinism per seed") {
    GenSpec spec;
    spec.n = 12;
    spec.num_agents = 3;
    spec.norm2 = 10.0;
    spec.cond = 40.0;
    spec.r_norm = 1.0;
    spec.seed = 123;
    QuadraticProblem a = generate_problem(spec);
    QuadraticProblem b = generate_problem(spec);
    CHECK((a.q() - b.q()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.r() - b.r()).cwiseAbs().maxCoeff() == 0.0);

    spec.seed = 124;
    QuadraticProblem c = generate_problem(spec);
    CHECK((a.q() - c.q()).cwiseAbs().maxCoeff() > 0.0);
}
