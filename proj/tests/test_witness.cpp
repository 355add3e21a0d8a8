#include <doctest.h>

#include "treeshift/error.hpp"
#include "treeshift/witness.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <set>

using namespace treeshift;

namespace {

VertexAddr A(const char* text)
{
	return parse_address(text);
}

/// Brute-force minimum of sup_j x_j|μ_j| over a simplex grid of the given resolution.
double grid_min(const std::vector<double>& mod, int steps)
{
	double best = std::numeric_limits<double>::infinity();
	std::vector<int> k(mod.size(), 0);
	std::function<void(std::size_t, int)> rec = [&](std::size_t j, int left) {
		if (j + 1 == mod.size()) {
			k[j] = left;
			double sup = 0;
			for (std::size_t i = 0; i < mod.size(); ++i)
				sup = std::max(sup, k[i] * mod[i] / steps);
			best = std::min(best, sup);
			return;
		}
		for (int a = 0; a <= left; ++a) {
			k[j] = a;
			rec(j + 1, left - a);
		}
	};
	rec(0, steps);
	return best;
}

} // namespace

TEST_CASE("exponent selection examples")
{
	auto a = solve_exponents({{1}, {2}});
	CHECK(a.beta == Multi{1});
	CHECK(a.s[0] == doctest::Approx(1));
	CHECK(a.values == std::vector<double>{1, 2});

	auto b = solve_exponents({{2}, {3}});
	CHECK(b.beta == Multi{2});
	CHECK(b.s[0] == doctest::Approx(0.5));
	CHECK(b.values[1] == doctest::Approx(1.5));

	auto c = solve_exponents({{1, 1}, {1, 2}, {2, 1}});
	CHECK(c.beta == Multi{1, 1});
	CHECK(c.s[0] == doctest::Approx(0.5));
	CHECK(c.s[1] == doctest::Approx(0.5));
	CHECK(c.values[1] == doctest::Approx(1.5));
	CHECK(c.values[2] == doctest::Approx(1.5));

	CHECK_THROWS_AS(solve_exponents({}), Error);
	CHECK_THROWS_AS(solve_exponents({{0, 0}}), Error);
	try {
		solve_exponents({{1, 2}, {1, 2}});
		FAIL("duplicate exponents accepted");
	} catch (const Error& e) {
		CHECK(e.kind() == ErrorKind::degenerate_exponents);
	}
}

TEST_CASE("exponent selection properties")
{
	std::mt19937_64 rng(7);
	std::uniform_int_distribution<int> entry(0, 3), dim(1, 3), size(1, 5);
	for (int trial = 0; trial < 300; ++trial) {
		int d = dim(rng);
		std::set<Multi> P;
		int want = size(rng);
		while (static_cast<int>(P.size()) < want) {
			Multi m(d);
			for (auto& x : m)
				x = entry(rng);
			if (std::any_of(m.begin(), m.end(), [](int x) { return x > 0; }))
				P.insert(m);
			if (P.size() >= std::pow(4, d) - 1)
				break;
		}
		std::vector<Multi> Pv(P.begin(), P.end());
		auto sol = solve_exponents(Pv);
		CHECK(linear_form(sol.beta, sol.s) == doctest::Approx(1).epsilon(1e-12));
		for (double s : sol.s)
			CHECK(s > 0);
		for (std::size_t i = 0; i < Pv.size(); ++i) {
			CHECK(sol.values[i] == doctest::Approx(linear_form(Pv[i], sol.s)).epsilon(1e-12));
			if (Pv[i] != sol.beta)
				CHECK(sol.values[i] > 1);
		}
		// Rescaling the direction leaves s and β unchanged.
		std::vector<double> scaled = sol.s;
		for (auto& x : scaled)
			x *= 3.7;
		std::size_t arg = 0;
		for (std::size_t i = 1; i < Pv.size(); ++i)
			if (linear_form(Pv[i], scaled) < linear_form(Pv[arg], scaled))
				arg = i;
		CHECK(Pv[arg] == sol.beta);
	}
}

TEST_CASE("key lemma optimizer")
{
	auto a = keylemma_optimal({1, 1});
	CHECK(a.value == doctest::Approx(0.5));
	CHECK(a.x[0] == doctest::Approx(0.5));
	auto b = keylemma_optimal({cx(0, 3)});
	CHECK(b.value == doctest::Approx(3));
	CHECK(b.x[0] == 1);
	auto c = keylemma_optimal({1, 2, 4});
	CHECK(c.value == doctest::Approx(4.0 / 7));
	CHECK(c.x[0] == doctest::Approx(4.0 / 7));
	CHECK(c.x[1] == doctest::Approx(2.0 / 7));
	CHECK(c.x[2] == doctest::Approx(1.0 / 7));
	CHECK_THROWS_AS(keylemma_optimal({}), Error);

	std::mt19937_64 rng(11);
	std::uniform_real_distribution<double> logmod(-1, 1), arg(0, 6.28);
	std::uniform_int_distribution<int> len(1, 3);
	for (int trial = 0; trial < 40; ++trial) {
		std::vector<cx> mu;
		std::vector<double> mod;
		for (int j = len(rng); j > 0; --j) {
			double r = std::pow(10.0, logmod(rng));
			mu.push_back(std::polar(r, arg(rng)));
			mod.push_back(r);
		}
		auto k = keylemma_optimal(mu);
		double sup = 0, total = 0;
		for (std::size_t j = 0; j < mu.size(); ++j) {
			sup = std::max(sup, k.x[j] * mod[j]);
			total += k.x[j];
		}
		CHECK(total == doctest::Approx(1).epsilon(1e-12));
		CHECK(sup == doctest::Approx(k.value).epsilon(1e-12));
		CHECK(k.value <= grid_min(mod, 100) * (1 + 1e-12));
	}
}

TEST_CASE("rooted witness examples")
{
	auto t = TreeSpec::n_adic(2);
	auto w = make_rolewicz(2);
	auto r = build_rooted(SpaceTag::lp(2), w, t, {}, FinSuppVec::basis(A("@")), {{1}, {2}}, 5);
	REQUIRE(r.h.size() == 1);
	REQUIRE(r.h[0].size() == 1);
	CHECK(std::abs(r.h[0].entries().begin()->second - 1.0 / 32) < 1e-15);
	CHECK(r.hit_error == 0);
	REQUIRE(r.collapse_norms.size() == 1);
	CHECK(r.collapse_norms[0].second == doctest::Approx(std::pow(2.0, -5)).epsilon(1e-14));
	CHECK(r.approach_norms[0] == doctest::Approx(1.0 / 32));

	auto empty = build_rooted(SpaceTag::lp(2), w, t, {}, {}, {{1}, {2}}, 5);
	CHECK(empty.h[0].empty());
	CHECK(empty.hit_error == 0);
	CHECK(empty.collapse_norms[0].second == 0);

	auto c0 = build_rooted(SpaceTag::c0(), w, t, {}, FinSuppVec::basis(A("@")), {{1}, {2}}, 4);
	CHECK(c0.h[0].size() == 16);
	CHECK(sup_norm(c0.h[0]) == doctest::Approx(std::pow(2.0, -8)).epsilon(1e-14));
	CHECK(c0.hit_error < 1e-15);
	CHECK(c0.keylemma_values == std::vector<double>{std::pow(2.0, -8)});

	// Too small an iterate for the support.
	FinSuppVec deep = FinSuppVec::basis(A("@.1.2.1"));
	try {
		build_rooted(SpaceTag::lp(2), w, t, {deep}, FinSuppVec::basis(A("@")), {{1}, {2}}, 2);
		FAIL("accepted a colliding iterate");
	} catch (const NeedsLargerN& e) {
		CHECK(e.minimal_n() == 4);
	}
}

TEST_CASE("rooted witness matches closed collapse norms")
{
	std::mt19937_64 rng(3);
	std::uniform_real_distribution<double> u(-1, 1);
	auto t = TreeSpec::n_adic(3);
	auto w = make_dyadic_counterexample(2);
	auto space = SpaceTag::lp(2);
	std::vector<Multi> P{{1, 1}, {2, 1}, {1, 3}, {0, 2}};
	for (int trial = 0; trial < 5; ++trial) {
		// Dyadic weights live on the binary tree only.
		auto bt = TreeSpec::n_adic(2);
		FinSuppVec g, f1, f2;
		g.set(A("@"), cx(u(rng), u(rng)));
		g.set(A("@.2"), cx(u(rng), u(rng)));
		g.set(A("@.1.2"), cx(u(rng), u(rng)));
		f1.set(A("@.1"), cx(u(rng), u(rng)));
		f2.set(A("@.2.2"), cx(u(rng), u(rng)));
		for (std::int64_t n : {3, 6, 9}) {
			auto r = build_rooted(space, w, bt, {f1, f2}, g, P, n);
			CHECK(r.hit_error <= 1e-12 * (1 + norm(g, space)));
			const auto& ex = *r.exponents;
			for (const auto& [alpha, value] : r.collapse_norms) {
				double L = linear_form(alpha, ex.s);
				double acc = 0;
				for (const auto& b : r.bumps)
					acc += std::pow(std::abs(g.at(b.base)), 2 * L) / std::pow(b.weight, 2 * (L - 1));
				CHECK(value == doctest::Approx(std::sqrt(acc)).epsilon(1e-10));
			}
		}
	}
	(void)t;
}

TEST_CASE("right inverses")
{
	std::mt19937_64 rng(5);
	std::uniform_int_distribution<int> child(1, 2), depth(0, 3), iter(1, 8);
	std::vector<std::pair<TreeSpec, WeightFamily>> cases{
		{TreeSpec::n_adic(2), make_dyadic_counterexample(2)},
		{TreeSpec::n_adic(2), make_rolewicz(cx(1.5, 0.5))},
		{TreeSpec::n_adic(3), make_fertile_no_algebra(TreeSpec::n_adic(3), 2)},
	};
	for (int trial = 0; trial < 30; ++trial) {
		const auto& [t, w] = cases[trial % cases.size()];
		VertexAddr a;
		for (int k = depth(rng); k > 0; --k)
			a.path.push_back(child(rng));
		std::int64_t n = iter(rng);
		auto ri = right_inverse(w, t, a, n);
		CHECK_FALSE(ri.truncated);
		auto back = apply(w, t, ri.R, n);
		CHECK(back.size() == 1);
		CHECK(std::abs(back.at(a) - 1.0) < 1e-12);
		double total = 0;
		for (const auto& [u, _] : ri.R.entries())
			total += std::abs(path_product(w, t, a, u));
		CHECK(sup_norm(ri.R) == doctest::Approx(1 / total).epsilon(1e-10));
		CHECK(ri.keylemma_value == doctest::Approx(1 / total).epsilon(1e-12));
	}
}

TEST_CASE("unrooted power witness")
{
	auto t = TreeSpec::free_left_end(2);
	auto w = make_bilateral_rolewicz(t, 2, 0, 0, {{0, 1}});
	auto space = SpaceTag::lp(2);
	FinSuppVec f;
	f.set(A("@.1.1.1"), cx(0.5, 0.2));
	f.set(A("@.2.1.2"), -0.7);
	FinSuppVec g = FinSuppVec::basis(A("@.2.2"), cx(0.3, -0.4));

	SUBCASE("vanishing left products put everything in the first class")
	{
		for (int m : {2, 3}) {
			auto r = build_unrooted_power(space, w, t, f, g, m, 12);
			CHECK(r.f2.empty());
			CHECK(r.corrections.empty());
			CHECK(r.identity_error < 1e-12);
			CHECK(r.residual_norm == doctest::Approx(r.hit_error).epsilon(1e-12));
		}
	}

	SUBCASE("forced second class cancels exactly")
	{
		WitnessOptions opt;
		opt.tau = 0;
		for (int m : {1, 2, 3}) {
			auto r = build_unrooted_power(space, w, t, f, g, m, 6, opt);
			CHECK(r.f1.empty());
			CHECK(r.f2.size() == 2);
			CHECK_FALSE(r.corrections.empty());
			for (const auto& c : r.cancellations)
				CHECK(c.coefficient <= 1e-10 * std::max(1.0, c.magnitude));
			CHECK(r.hit_error < 1e-12);
			CHECK(r.identity_error < 1e-12);
		}
		auto c0 = build_unrooted_power(SpaceTag::c0(), w, t, f, g, 2, 6, opt);
		for (const auto& c : c0.cancellations)
			CHECK(c.coefficient <= 1e-10 * std::max(1.0, c.magnitude));
		CHECK(c0.hit_error < 1e-12);
	}

	SUBCASE("single sibling hand computation")
	{
		// Binary above generation 0: @.1 has sibling @.2 under @.
		WitnessOptions opt;
		opt.tau = 0;
		FinSuppVec fa = FinSuppVec::basis(A("@.1"), 0.5);
		auto r = build_unrooted_power(space, w, t, fa, {}, 2, 1, opt);
		REQUIRE(r.corrections.size() == 1);
		CHECK(r.corrections[0].target == A("@.2"));
		// B h^2 at @: 0.25·λ(@.1) + (i·sqrt(0.25))^2·λ(@.2) = 0.
		auto hit = apply(w, t, int_power(r.h[0], 2), 1);
		CHECK(std::abs(hit.at(A("@"))) < 1e-15);
	}

	SUBCASE("no free sibling asks for a larger iterate")
	{
		WitnessOptions opt;
		opt.tau = 0;
		FinSuppVec fa;
		fa.set(A("@.1.1"), 1);
		fa.set(A("@.1.2"), 1);
		try {
			build_unrooted_power(space, w, t, fa, {}, 2, 1, opt);
			FAIL("accepted an iterate with no free sibling");
		} catch (const NeedsLargerN& e) {
			CHECK(e.minimal_n() == 2);
		}
	}
}

TEST_CASE("unrooted algebra witness")
{
	auto t = TreeSpec::free_left_end(2);
	auto w = make_bilateral_rolewicz(t, 2, 0, 0, {{0, 1}});
	auto space = SpaceTag::lp(2);
	FinSuppVec g = FinSuppVec::basis(A("@.1"), 0.8);

	auto zero = build_unrooted_algebra(space, w, t, {}, g, {{1}, {3}}, 4);
	CHECK(zero.residual_norm == 0);
	CHECK(zero.hit_error < 1e-15);

	FinSuppVec f = FinSuppVec::basis(A("@"), 1);
	double prev = 2;
	for (std::int64_t n : {3, 6, 9, 12}) {
		auto r = build_unrooted_algebra(space, w, t, {f}, g, {{1}, {3}}, n);
		double left = std::abs(path_product_up(w, t, A("@"), n));
		CHECK(r.residual_norm == doctest::Approx(left).epsilon(1e-12));
		CHECK(r.hit_error == doctest::Approx(r.residual_norm).epsilon(1e-12));
		CHECK(r.identity_error < 1e-12);
		CHECK(r.residual_norm < prev);
		prev = r.residual_norm;
	}

	auto ones = make_symmetric(LevelWeights{{}, 1, 1, 0});
	auto flat = build_unrooted_algebra(space, ones, t, {FinSuppVec::basis(A("@"), 0.6)}, g, {{1}, {3}}, 8);
	CHECK(flat.residual_norm == doctest::Approx(0.6));

	auto c0 = build_unrooted_algebra(SpaceTag::c0(), w, t, {f}, g, {{1}, {3}}, 5);
	CHECK(c0.identity_error < 1e-12);
}

TEST_CASE("witness norms improve with the iterate")
{
	auto t = TreeSpec::n_adic(2);
	auto space = SpaceTag::lp(2);
	FinSuppVec g;
	g.set(A("@"), 0.7);
	g.set(A("@.2.1"), cx(0, -0.4));
	for (const auto& w : {make_rolewicz(1.5), make_rolewicz(cx(0, 2))}) {
		WitnessReport prev;
		bool first = true;
		for (std::int64_t n : {4, 8, 12}) {
			auto r = build_rooted(space, w, t, {FinSuppVec::basis(A("@.1"), 1)}, g, {{1}, {2}, {4}}, n);
			if (!first) {
				CHECK(r.approach_norms[0] <= prev.approach_norms[0]);
				for (std::size_t k = 0; k < r.collapse_norms.size(); ++k)
					CHECK(r.collapse_norms[k].second <= prev.collapse_norms[k].second);
			}
			prev = r;
			first = false;
		}
	}
	auto fle = TreeSpec::free_left_end(2);
	auto bw = make_bilateral_rolewicz(fle, 2, 0, 0, {{0, 1}});
	double prev_residual = std::numeric_limits<double>::infinity();
	for (std::int64_t n : {6, 12, 18}) {
		auto r = build_unrooted_power(space, bw, fle, FinSuppVec::basis(A("@.1.2"), 0.9), g, 2, n);
		CHECK(r.residual_norm < prev_residual);
		CHECK(r.hit_error == doctest::Approx(r.residual_norm).epsilon(1e-9));
		prev_residual = r.residual_norm;
	}
}
