#include <doctest.h>

#include "treeshift/error.hpp"
#include "treeshift/shift.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace treeshift;

namespace {

VertexAddr A(const char* text)
{
	return parse_address(text);
}

FinSuppVec random_vec(std::mt19937_64& rng, const std::vector<VertexAddr>& pool, int k)
{
	std::uniform_real_distribution<double> u(-2, 2);
	std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
	FinSuppVec f;
	for (int i = 0; i < k; ++i)
		f.add(pool[pick(rng)], cx(u(rng), u(rng)));
	return f;
}

} // namespace

TEST_CASE("vector norms")
{
	auto e = FinSuppVec::basis(A("@.1"));
	for (auto s : {SpaceTag::l1(), SpaceTag::lp(2), SpaceTag::lp(3.3), SpaceTag::c0()})
		CHECK(norm(e, s) == 1);
	auto f = FinSuppVec::basis(A("@.1"), 3) + FinSuppVec::basis(A("@.2"), 4);
	CHECK(norm(f, SpaceTag::lp(2)) == doctest::Approx(5).epsilon(1e-15));
	CHECK(norm(f, SpaceTag::c0()) == 4);
	CHECK(norm(f, SpaceTag::l1()) == 7);
	CHECK(norm(FinSuppVec{}, SpaceTag::lp(2)) == 0);
}

TEST_CASE("zero entries are never stored")
{
	auto f = FinSuppVec::basis(A("@"), 2);
	f.add(A("@"), -2);
	CHECK(f.empty());
	f = FinSuppVec({{A("@"), 0}, {A("@.1"), 1}});
	CHECK(f.size() == 1);
}

TEST_CASE("coordinatewise product")
{
	auto f = FinSuppVec::basis(A("@.1"), 2);
	auto g = FinSuppVec::basis(A("@.2"), 3);
	CHECK(cw_product(f, g).empty());
	CHECK(cw_product(f, FinSuppVec::basis(A("@.1"), 3)) == FinSuppVec::basis(A("@.1"), 6));
	auto h = FinSuppVec::basis(A("@"), cx(1, 1));
	auto cube = cw_product(cw_product(h, h), h);
	CHECK(std::abs(cube.at(A("@")) - cx(-2, 2)) < 1e-15);
	CHECK(int_power(h, 3) == cube);

	std::mt19937_64 rng(7);
	std::vector<VertexAddr> pool{A("@"), A("@.1"), A("@.2"), A("@.1.1"), A("@.2.2")};
	for (int t = 0; t < 50; ++t) {
		auto a = random_vec(rng, pool, 3), b = random_vec(rng, pool, 3), c = random_vec(rng, pool, 3);
		CHECK(cw_product(a, b) == cw_product(b, a));
		auto l = cw_product(cw_product(a, b), c), r = cw_product(a, cw_product(b, c));
		CHECK(norm(l - r, SpaceTag::c0()) <= 1e-14 * (1 + norm(l, SpaceTag::c0())));
		FinSuppVec ind;
		for (auto& [v, z] : a.entries())
			ind.set(v, 1);
		CHECK(cw_product(ind, ind) == ind);
	}
}

TEST_CASE("principal powers")
{
	auto f = FinSuppVec::basis(A("@"), 4);
	CHECK(power(f, 1) == f);
	CHECK(std::abs(power(f, 0.5).at(A("@")) - cx(2)) < 1e-15);
	auto root = power(FinSuppVec::basis(A("@"), -1), 1.0 / 3).at(A("@"));
	CHECK(std::abs(root - std::polar(1.0, std::numbers::pi / 3)) < 1e-15);

	std::mt19937_64 rng(11);
	std::vector<VertexAddr> pool{A("@"), A("@.1"), A("@.2"), A("@.1.1")};
	for (int t = 0; t < 50; ++t) {
		auto g = random_vec(rng, pool, 4);
		for (int m = 1; m <= 5; ++m) {
			auto back = int_power(power(g, 1.0 / m), m);
			for (auto& [v, z] : g.entries())
				CHECK(std::abs(back.at(v) - z) <= 1e-12 * std::abs(z));
		}
		double s = 0.37 + t * 0.05;
		auto p = power(g, s);
		for (auto& [v, z] : g.entries()) {
			CHECK(std::abs(p.at(v)) == doctest::Approx(std::pow(std::abs(z), s)).epsilon(1e-14));
			CHECK(std::abs(std::remainder(std::arg(p.at(v)) - s * std::arg(z), 2 * std::numbers::pi)) < 1e-12);
		}
	}
}

TEST_CASE("higher exponents give smaller norms")
{
	std::mt19937_64 rng(3);
	std::vector<VertexAddr> pool{A("@"), A("@.1"), A("@.2"), A("@.1.1"), A("@.1.2"), A("@.2.1")};
	for (int t = 0; t < 100; ++t) {
		auto f = random_vec(rng, pool, 5);
		for (double p : {1.0, 1.5, 2.0, 3.0})
			for (int m = static_cast<int>(std::ceil(p)); m <= 6; ++m) {
				auto sp = p == 1 ? SpaceTag::l1() : SpaceTag::lp(p);
				auto sm = m == 1 ? SpaceTag::l1() : SpaceTag::lp(m);
				CHECK(norm(f, sm) <= norm(f, sp) * (1 + 1e-14));
			}
	}
}

TEST_CASE("shift examples")
{
	auto dyadic = TreeSpec::n_adic(2);
	auto w = make_rolewicz(2);
	CHECK(apply(w, dyadic, FinSuppVec::basis(A("@")), 1).empty());
	CHECK(apply(w, dyadic, FinSuppVec::basis(A("@.1.2")), 2) == FinSuppVec::basis(A("@"), 4));
	auto f = FinSuppVec::basis(A("@.1.2"), cx(1, 2));
	CHECK(apply(w, dyadic, f, 0) == f);

	auto orbit = orbit_norms(w, dyadic, FinSuppVec::basis(A("@.1")), {}, SpaceTag::lp(2), 4);
	REQUIRE(orbit.size() == 5);
	CHECK(orbit[1].second == 2);
	CHECK(orbit[2].second == 0);
	CHECK(orbit[4].second == 0);
	auto deep = FinSuppVec::basis(A("@.1.2.1.1.2"));
	orbit = orbit_norms(w, dyadic, deep, FinSuppVec::basis(A("@"), 32), SpaceTag::lp(2), 6);
	CHECK(orbit[5].second == 0);
	orbit = orbit_norms(w, dyadic, deep, {}, SpaceTag::lp(2), 0);
	REQUIRE(orbit.size() == 1);
	CHECK(orbit[0].second == 1);
}

TEST_CASE("shift is linear and a semigroup")
{
	auto t = TreeSpec::free_left_end(2);
	auto w = make_bilateral_rolewicz(t, cx(1.5, 0.5), -1, 1, {{-1, 3}, {0, cx(0, 1)}, {1, 0.25}});
	std::vector<VertexAddr> pool;
	walk_subtree(t, A("@^3"), 5, 1000, [&](const VertexAddr& v, std::int64_t) {
		pool.push_back(v);
		return true;
	});
	std::mt19937_64 rng(5);
	for (int trial = 0; trial < 30; ++trial) {
		auto f = random_vec(rng, pool, 6), g = random_vec(rng, pool, 6);
		cx a(0.3, -1.2), b(2.0, 0.7);
		for (int n = 0; n <= 6; ++n) {
			auto lhs = apply(w, t, a * f + b * g, n);
			auto rhs = a * apply(w, t, f, n) + b * apply(w, t, g, n);
			CHECK(norm(lhs - rhs, SpaceTag::c0()) <= 1e-12 * (1 + norm(lhs, SpaceTag::c0())));
			for (int k = 0; k <= 4; ++k) {
				auto two = apply(w, t, apply(w, t, f, n), k);
				auto one = apply(w, t, f, n + k);
				CHECK(norm(two - one, SpaceTag::c0()) <= 1e-12 * (1 + norm(one, SpaceTag::c0())));
			}
		}
	}
}

TEST_CASE("ancestor hops agree with the definition")
{
	std::mt19937_64 rng(17);
	std::uniform_real_distribution<double> u(-2, 2);
	for (int trial = 0; trial < 40; ++trial) {
		std::map<VertexAddr, ChildCount> arity;
		std::map<VertexAddr, cx> weights;
		auto base = TreeSpec::n_adic(3);
		walk_subtree(base, A("@"), 6, 100000, [&](const VertexAddr& v, std::int64_t) {
			arity[v] = 1 + static_cast<std::int64_t>(rng() % 3);
			weights[v] = cx(u(rng), u(rng));
			return true;
		});
		auto t = TreeSpec::table(TreeKind::rooted, arity, 1);
		auto w = make_table(weights, 1);
		std::vector<VertexAddr> all;
		walk_subtree(t, A("@"), 6, 100000, [&](const VertexAddr& v, std::int64_t) {
			all.push_back(v);
			return true;
		});
		auto f = random_vec(rng, all, 8);
		for (int n = 0; n <= 6; ++n) {
			auto fast = apply(w, t, f, n);
			auto slow = apply_by_definition(w, t, f, n, all);
			CHECK(norm(fast - slow, SpaceTag::c0()) <= 1e-12 * (1 + norm(fast, SpaceTag::c0())));
		}
	}
}
