#include <doctest.h>

#include <cmath>

#include "qhist/inference.hpp"
#include "qhist/random.hpp"
#include "qhist/scenario.hpp"
#include "support.hpp"

using namespace qhist;
using qhist::test::basis;
using qhist::test::diag;
using qhist::test::vec;

namespace {

constexpr double tau = kDefaultTolerance;

RetrodictionInput three_box_input() {
    return {"three-box",
            State::from_pure(CVector::Constant(3, 1.0 / std::sqrt(3.0))),
            0.0,
            ray(basis(3, 0)),
            ray(basis(3, 1)),
            1.0,
            ray(vec({1, 1, -1})),
            2.0};
}

Context coordinate(std::size_t d) {
    std::vector<Projector> atoms;
    for (std::size_t k = 0; k < d; ++k) atoms.push_back(ray(basis(d, k)));
    return validate_context(atoms);
}

}  // namespace

TEST_CASE("three-box retrodiction is blocked") {
    const auto report = analyze_retrodiction(three_box_input(), Propagator::trivial(3));
    CHECK(report.contrary);
    REQUIRE(report.ch_results.size() == 2);
    for (const auto& f : report.ch_results) {
        CHECK(f.consistent);
        REQUIRE(f.conditional.defined());
        CHECK(std::abs(*f.conditional.value - 1.0) <= tau);
    }
    REQUIRE(report.gc_checks.size() == 3);
    CHECK_FALSE(report.gc_checks[0].commutes);
    CHECK_FALSE(report.gc_checks[1].commutes);
    CHECK(report.gc_checks[2].commutes);
    CHECK(report.gc_checks[0].norm == doctest::Approx(2.0 / 3.0));
    CHECK_FALSE(report.gc_compatible);
    CHECK(report.gc_conditionals.empty());
    CHECK(report.conclusion == Conclusion::blocked_by_gc_incompatibility);
}

TEST_CASE("diagonal retrodiction: both frameworks agree") {
    const RetrodictionInput in{"diag", State::maximally_mixed(3), 0.0,
                               Projector::from_matrix(diag({1, 0, 0})),
                               Projector::from_matrix(diag({0, 1, 0})), 1.0,
                               Projector::from_matrix(diag({1, 1, 0})), 2.0};
    const auto report = analyze_retrodiction(in, Propagator::trivial(3));
    CHECK(report.contrary);
    CHECK(report.gc_compatible);
    REQUIRE(report.gc_conditionals.size() == 2);
    const double sum = *report.gc_conditionals[0].value + *report.gc_conditionals[1].value;
    CHECK(sum <= 1.0 + 5 * tau);
    CHECK(sum == doctest::Approx(1.0));
    CHECK(report.conclusion == Conclusion::both_frameworks_agree);
}

TEST_CASE("non-contrary input short-circuits") {
    auto in = three_box_input();
    in.q = in.p;
    const auto report = analyze_retrodiction(in, Propagator::trivial(3));
    CHECK_FALSE(report.contrary);
    CHECK(report.ch_results.empty());
    CHECK(report.gc_checks.empty());
    CHECK(report.conclusion == Conclusion::not_contrary);
}

TEST_CASE("degenerate conditioning is recorded, not thrown") {
    auto in = three_box_input();
    in.rho0 = State::from_pure(vec({1, -1, 0}) / std::sqrt(2.0));
    in.r = ray(basis(3, 2));
    const auto report = analyze_retrodiction(in, Propagator::trivial(3));
    REQUIRE(report.gc_compatible);
    for (const auto& o : report.gc_conditionals) {
        CHECK_FALSE(o.defined());
        CHECK(*o.reason == UndefinedReason::zero_conditioning);
    }
    CHECK(report.conclusion == Conclusion::both_frameworks_agree);
}

TEST_CASE("analyze_retrodiction rejects bad input") {
    auto in = three_box_input();
    in.t2 = in.t1;
    CHECK_THROWS_AS(analyze_retrodiction(in, Propagator::trivial(3)), InputError);
    CHECK_THROWS_AS(analyze_retrodiction(three_box_input(), Propagator::trivial(2)), InputError);
}

TEST_CASE("conclusion rule") {
    const auto fam = [](bool consistent, double value) {
        return FamilyResult{"p", consistent, 0.0, Outcome{value, std::nullopt, 0.0}};
    };
    CHECK(conclude(false, {fam(true, 1.0), fam(true, 1.0)}, false, tau) == Conclusion::not_contrary);
    CHECK(conclude(true, {fam(true, 1.0), fam(true, 1.0)}, false, tau) ==
          Conclusion::blocked_by_gc_incompatibility);
    CHECK(conclude(true, {fam(true, 1.0), fam(true, 1.0)}, true, tau) ==
          Conclusion::contrary_inference_in_ch);
    CHECK(conclude(true, {fam(false, 1.0), fam(true, 1.0)}, false, tau) ==
          Conclusion::both_frameworks_agree);
    CHECK(conclude(true, {fam(true, 0.5), fam(true, 1.0)}, false, tau) ==
          Conclusion::both_frameworks_agree);
    CHECK(conclude(true, {fam(true, 1.0 - 9 * tau), fam(true, 1.0)}, false, tau) ==
          Conclusion::blocked_by_gc_incompatibility);
}

TEST_CASE("report soundness over random scenarios") {
    Rng rng(401);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t d = qhist::test::random_dim(rng, 2, 5);
        const auto ctx = qhist::test::random_context(d, rng);
        if (ctx.size() < 2) continue;
        const auto sp = qhist::test::random_subset(ctx.size(), rng);
        const auto sq = sp.complement().intersection(qhist::test::random_subset(ctx.size(), rng));
        const auto rctx = qhist::test::random_context(d, rng);
        const auto r = Property(rctx, qhist::test::random_subset(rctx.size(), rng)).projector();
        const auto h = Propagator::from_hamiltonian(random_hermitian(d, rng));
        const RetrodictionInput in{"random", random_mixed_state(d, rng), 0.0,
                                   Property(ctx, sp).projector(), Property(ctx, sq).projector(),
                                   1.0, r, 2.0};
        const auto report = analyze_retrodiction(in, h);
        if (report.conclusion == Conclusion::contrary_inference_in_ch) {
            for (const auto& f : report.ch_results) {
                CHECK(f.consistent);
                CHECK(*f.conditional.value >= 1.0 - 10 * tau);
            }
        }
        CHECK(report.conclusion != Conclusion::contrary_inference_in_ch);
        if (report.gc_compatible) {
            double sum = 0.0;
            for (const auto& o : report.gc_conditionals)
                if (o.defined()) sum += *o.value;
            CHECK(sum <= 1.0 + 5 * tau);
        }
    }
}

TEST_CASE("three-box fixture is stable under global unitary conjugation") {
    const auto base = analyze_retrodiction(three_box_input(), Propagator::trivial(3));
    Rng rng(403);
    for (int trial = 0; trial < 50; ++trial) {
        const CMatrix u = random_unitary(3, rng);
        auto in = three_box_input();
        const auto conj = [&](const Projector& p) {
            const CMatrix m = u * p.matrix() * u.adjoint();
            return Projector::from_matrix(0.5 * (m + m.adjoint()));
        };
        const CMatrix rho = u * in.rho0.rho() * u.adjoint();
        in.rho0 = State::from_density(0.5 * (rho + rho.adjoint()));
        in.p = conj(in.p);
        in.q = conj(in.q);
        in.r = conj(in.r);
        const auto report = analyze_retrodiction(in, Propagator::trivial(3));
        CHECK(report.conclusion == base.conclusion);
        CHECK(report.contrary == base.contrary);
        CHECK(report.gc_compatible == base.gc_compatible);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(report.ch_results[i].consistent == base.ch_results[i].consistent);
            CHECK(std::abs(*report.ch_results[i].conditional.value -
                           *base.ch_results[i].conditional.value) <= 10 * tau);
        }
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(report.gc_checks[i].commutes == base.gc_checks[i].commutes);
            CHECK(std::abs(report.gc_checks[i].norm - base.gc_checks[i].norm) <= 10 * tau);
        }
    }
}

TEST_CASE("three_box_scenario loads and reproduces the fixture") {
    const auto loaded = load_scenario(three_box_scenario());
    CHECK(loaded.spec.dimension == 3);
    CHECK(loaded.contexts.size() == 4);
    CHECK((loaded.contexts[2].context.atom(0).matrix() - ray(vec({1, 1, -1})).matrix()).norm() <
          1e-15);
}

TEST_CASE("scan_contrary_pairs examples") {
    const auto coord = coordinate(3);
    const auto scan = scan_contrary_pairs({coord});
    CHECK_FALSE(scan.budget_exceeded);
    // 7 non-empty subsets; contrary pairs are disjoint ones: (3^3 - 2*2^3 + 1) / 2 = 6.
    CHECK(scan.pairs.size() == 6);
    for (const auto& pair : scan.pairs) {
        CHECK(pair.first.labels().disjoint_from(pair.second.labels()));
    }
    CHECK(scan.pairs.front().first == coord.property({0}));
    CHECK(scan.pairs.front().second == coord.property({1}));

    const auto trivial = validate_context(std::vector{Projector::identity(3)});
    CHECK(scan_contrary_pairs({trivial}).pairs.empty());

    const auto a = validate_context(std::vector{ray(basis(2, 0)), ray(basis(2, 1))});
    const auto b = validate_context(std::vector{ray(vec({1, 1})), ray(vec({1, -1}))});
    const auto mixed = scan_contrary_pairs({a, b});
    CHECK(mixed.pairs.size() == 2);
    for (const auto& pair : mixed.pairs) CHECK(pair.first_context == pair.second_context);

    const auto capped = scan_contrary_pairs({coord}, 5);
    CHECK(capped.budget_exceeded);
    CHECK(capped.examined == 5);
}

TEST_CASE("state dependence witness") {
    const auto w = demonstrate_state_dependence(1);
    CHECK(w.fixture_off_diagonal <= 1e-10);
    CHECK(w.random_off_diagonal > tau);
    CHECK(w.trials >= 1);
    const auto again = demonstrate_state_dependence(1);
    CHECK(again.random_state == w.random_state);
}
