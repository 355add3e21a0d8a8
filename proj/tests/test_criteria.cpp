#include <doctest.h>

#include "treeshift/criteria.hpp"
#include "treeshift/error.hpp"

#include <cmath>

using namespace treeshift;

namespace {

VertexAddr A(const char* text)
{
	return parse_address(text);
}

bool close(double a, double b, double rel)
{
	return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace

TEST_CASE("shifted power sums match direct summation")
{
	for (double s : {0.3, 0.9, 1.0, 1.125, 2.0, 3.7})
		for (double c : {0.0, 1.0, 7.0, 1000.0})
			for (double M : {1.0, 5.0, 32.0, 33.0, 100.0, 4096.0, 65536.0}) {
				double direct = 0;
				for (double k = 1; k <= M; ++k)
					direct += std::pow(c + k, -s);
				CAPTURE(s);
				CAPTURE(c);
				CAPTURE(M);
				CHECK(close(shifted_power_sum(c, M, s), direct, 1e-12));
			}
	CHECK_THROWS_AS(shifted_power_sum(0, 0, 1), Error);
}

TEST_CASE("closed forms agree with enumeration")
{
	auto dyadic = TreeSpec::n_adic(2);
	auto triadic = TreeSpec::n_adic(3);
	auto quad = TreeSpec::n_adic(4);
	auto fle = TreeSpec::free_left_end(2);
	auto stair = TreeSpec::staircase();
	auto menthe = TreeSpec::menthe();
	struct Case
	{
		TreeSpec spec;
		WeightFamily w;
		std::vector<VertexAddr> at;
	};
	std::vector<Case> cases{
		{triadic, make_rolewicz(cx(0.6, 0.3)), {A("@"), A("@.2.3")}},
		{dyadic, make_dyadic_counterexample(2), {A("@"), A("@.1"), A("@.2.1.2")}},
		{dyadic, make_dyadic_counterexample(3), {A("@"), A("@.2.2")}},
		{quad, make_fertile_no_algebra(quad, 2), {A("@"), A("@.3.4")}},
		{fle, make_bilateral_rolewicz(fle, 2, -1, 1, {{-1, 3}, {0, cx(0, 1)}, {1, 0.25}}), {A("@^3"), A("@"), A("@^2.2")}},
		{stair, make_rolewicz(1.3), {A("@"), A("@.1.2"), A("@.1.2.3")}},
		{menthe, make_menthe(SequenceRule::geometric(1, 0.5), SequenceRule::power(1, 1)), {A("@.2"), A("@.4.1.1")}},
	};
	for (auto& c : cases)
		for (auto& v : c.at)
			for (std::int64_t n = 1; n <= 7; ++n) {
				CAPTURE(to_string(c.w.tag()));
				CAPTURE(format_address(v));
				CAPTURE(n);
				auto sup = crit_sup(c.w, c.spec, v, n);
				REQUIRE(sup.exact);
				auto bsup = crit_sup_budgeted(c.w, c.spec, v, n, 1 << 20);
				REQUIRE_FALSE(bsup.truncated);
				CHECK(close(sup.value, bsup.value, 1e-12));
				for (double q : {1.0, 2.0, 1.5}) {
					auto sum = crit_sum(c.w, c.spec, v, n, q);
					REQUIRE(sum.exact);
					CHECK(close(sum.value, crit_sum_budgeted(c.w, c.spec, v, n, q, 1 << 20).value, 1e-12));
				}
			}

	// Menthe root: enumeration only gives lower bounds.
	auto w = make_menthe(SequenceRule::geometric(1, 0.5), SequenceRule::power(1, 1));
	auto lower = crit_sum_budgeted(w, menthe, A("@"), 3, 2, 500);
	CHECK(lower.truncated);
	CHECK(lower.value <= crit_sum(w, menthe, A("@"), 3, 2).value);
	CHECK(close(lower.value, crit_sum(w, menthe, A("@"), 3, 2).value, 1e-12));
	CHECK(close(crit_sup(w, menthe, A("@"), 3).value, 1.5, 1e-15));
}

TEST_CASE("Rolewicz sums on N-adic trees")
{
	for (int N = 1; N <= 3; ++N) {
		auto t = TreeSpec::n_adic(N);
		for (double lam : {0.4, 0.9, 1.7}) {
			auto w = make_rolewicz(lam);
			for (int n = 1; n <= 8; ++n) {
				CHECK(close(crit_sup(w, t, A("@"), n).value, std::pow(lam, n), 1e-14));
				for (double q : {1.0, 2.0, 3.0}) {
					double expect = std::pow(N * std::pow(lam, q), n);
					CHECK(close(crit_sum(w, t, A("@"), n, q).value, expect, 1e-13));
					CHECK(close(crit_sum_budgeted(w, t, A("@.1"), n, q, 1 << 20).value, expect, 1e-12));
				}
			}
		}
	}
}

TEST_CASE("sup, unit sum and counts are ordered")
{
	auto dyadic = TreeSpec::n_adic(2);
	auto quad = TreeSpec::n_adic(4);
	struct Case
	{
		TreeSpec spec;
		WeightFamily w;
	};
	std::vector<Case> cases{{dyadic, make_dyadic_counterexample(2)},
							{quad, make_fertile_no_algebra(quad, 3)},
							{quad, make_rolewicz(cx(0, 1.2))}};
	for (auto& c : cases)
		for (auto& v : default_probes(c.spec))
			for (int n = 1; n <= 10; ++n) {
				double sup = crit_sup(c.w, c.spec, v, n).value;
				double sum = crit_sum(c.w, c.spec, v, n, 1).value;
				double count = *count_descendants(c.spec, v, n);
				CHECK(sup <= sum * (1 + 1e-12));
				CHECK(sum <= count * sup * (1 + 1e-12));
			}
}

TEST_CASE("dyadic counterexample bounds")
{
	auto t = TreeSpec::n_adic(2);
	auto w = make_dyadic_counterexample(2);
	double alpha = w.as<DyadicParams>().alpha;
	for (auto& v : default_probes(t))
		for (int n = 1; n <= 12; ++n)
			CHECK(crit_sup(w, t, v, n).value <= 1 + 1e-15);
	for (int n = 1; n <= 12; ++n)
		CHECK(crit_sum(w, t, A("@"), n, 2).value >= std::exp2(n * (1 - 2 * alpha)));
}

TEST_CASE("left products and ratios")
{
	auto t = TreeSpec::free_left_end(2);
	auto w = make_bilateral_rolewicz(t, 2, 0, 0, {{0, 1}});
	CHECK(crit_left(w, t, A("@"), 0) == cx(1));
	for (int n = 1; n <= 20; ++n) {
		CHECK(close(std::abs(crit_left(w, t, A("@"), n)), std::exp2(1 - n), 1e-15));
		auto r = crit_ratio(w, t, A("@"), n, RatioMode::sup);
		CHECK(close(r.companion, std::exp2(n - 1), 1e-15));
		CHECK(r.ratio == doctest::Approx(1).epsilon(1e-14));
		CHECK(r.value == r.companion);
	}
	CHECK_THROWS_AS(crit_left(w, TreeSpec::n_adic(2), A("@"), 1), Error);

	auto ones = make_symmetric(LevelWeights{});
	LevelArity bush;
	bush.below = 2;
	bush.above = 3;
	auto b = TreeSpec::levels(TreeKind::unrooted, bush);
	for (auto& v : default_probes(b, 20))
		for (int n = 1; n <= 5; ++n) {
			CHECK(std::abs(crit_left(ones, b, v, n)) == 1);
			CHECK(crit_ratio(ones, b, v, n, RatioMode::sup).ratio == 1);
		}
	auto sym = make_symmetric(LevelWeights{{{0, 3}, {1, cx(0, 0.5)}}, 1.5, 0.7, 0});
	for (auto& v : default_probes(t))
		for (int n = 1; n <= 8; ++n)
			CHECK(crit_ratio(sym, t, v, n, RatioMode::sup).ratio == doctest::Approx(1).epsilon(1e-13));
	// Above the last branching every generation of a free-left-end tree is a singleton.
	auto r = crit_ratio(sym, t, A("@^5"), 3, RatioMode::sup);
	CHECK(r.ratio == doctest::Approx(1).epsilon(1e-14));
}

TEST_CASE("verdict examples")
{
	auto t = TreeSpec::n_adic(2);
	auto probes = default_probes(t);
	CHECK(probes.size() == 15);
	CriterionOptions opt;
	opt.horizon = 20;
	auto r = assemble_verdict(Theorem::rooted_algebra_iv, SpaceTag::lp(2), make_rolewicz(2), t, probes, opt);
	CHECK(r.verdict == VerdictKind::exact_divergence);
	CHECK_FALSE(r.certificate.empty());

	r = assemble_verdict(Theorem::rooted_algebra_iv, SpaceTag::lp(2), make_rolewicz(0.9), t, probes, opt);
	CHECK(r.verdict == VerdictKind::stalled_below);
	CHECK(r.bound == 1);
	CHECK(r.witness.empty());

	r = assemble_verdict(Theorem::rooted_algebra_iv, SpaceTag::lp(2), make_dyadic_counterexample(2), t, probes);
	CHECK(r.verdict == VerdictKind::stalled_below);
	CHECK(r.bound == 1);

	opt.horizon = 12;
	opt.threshold = 2;
	r = assemble_verdict(Theorem::rooted_hc_lp, SpaceTag::lp(2), make_dyadic_counterexample(2), t, probes, opt);
	CHECK(r.verdict == VerdictKind::diverges_up_to_horizon);
	std::vector<std::int64_t> all(12);
	for (int i = 0; i < 12; ++i)
		all[i] = i + 1;
	CHECK(r.witness == all);
	for (std::size_t k = 1; k < r.witness.size(); ++k)
		CHECK(r.min_per_n[r.witness[k] - 1] > r.min_per_n[r.witness[k - 1] - 1]);

	CHECK_THROWS_AS(parse_theorem("rooted-algebra-v"), Error);
	CHECK_THROWS_AS(assemble_verdict(Theorem::unrooted_v, SpaceTag::lp(2), make_rolewicz(2), t, probes), Error);
	CHECK_THROWS_AS(assemble_verdict(Theorem::rooted_hc_lp, SpaceTag::c0(), make_rolewicz(2), t, probes), Error);
}

TEST_CASE("unrooted verdicts")
{
	auto t = TreeSpec::free_left_end(2);
	auto w = make_bilateral_rolewicz(t, 2, 0, 0, {{0, 1}});
	auto probes = default_probes(t);
	for (auto th : {Theorem::unrooted_v, Theorem::free_left_end, Theorem::symmetric}) {
		auto r = assemble_verdict(th, SpaceTag::lp(2), w, t, probes);
		CHECK(r.verdict == VerdictKind::exact_divergence);
	}
	auto r = assemble_verdict(Theorem::unrooted_c0, SpaceTag::c0(), w, t, probes);
	CHECK(r.verdict == VerdictKind::exact_divergence);
	CHECK(r.note == "necessary conditions");

	// Rolewicz on an unrooted tree: left products never vanish.
	auto rw = assemble_verdict(Theorem::free_left_end, SpaceTag::lp(2), make_rolewicz(2), t, probes);
	CHECK(rw.verdict == VerdictKind::stalled_below);
}
