#include "treeshift/witness.hpp"

#include "treeshift/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace treeshift {

namespace {

struct Desc
{
	VertexAddr u;
	cx prod; ///< λ(a→u)
};

/// Χ^n(a) with path products, depth-first, at most `budget` visited vertices.
std::vector<Desc> descend(const WeightFamily& w, const TreeSpec& spec, const VertexAddr& a, std::int64_t n,
						  std::int64_t budget, bool& truncated)
{
	std::vector<Desc> out;
	std::vector<cx> prod(static_cast<std::size_t>(n + 1), cx(1));
	bool complete = walk_subtree(spec, a, n, budget, [&](const VertexAddr& u, std::int64_t depth) {
		if (depth == 0)
			return true;
		prod[depth] = prod[depth - 1] * w.value(spec, u);
		if (depth == n)
			out.push_back({u, prod[depth]});
		return true;
	});
	if (!complete)
		truncated = true;
	return out;
}

/// Drops descendants whose path product is below double precision relative
/// to the largest one. Any finite subset still gives an exact right inverse.
void prune_negligible(std::vector<Desc>& ds, bool& truncated)
{
	double top = 0;
	for (const auto& d : ds)
		top = std::max(top, std::abs(d.prod));
	auto before = ds.size();
	std::erase_if(ds, [&](const Desc& d) { return !(std::abs(d.prod) >= 1e-16 * top) || std::abs(d.prod) < 1e-250; });
	if (ds.size() != before)
		truncated = true;
}

std::set<VertexAddr> support_of(const std::vector<FinSuppVec>& f, const FinSuppVec& g)
{
	std::set<VertexAddr> s;
	for (const auto& fj : f)
		for (const auto& [v, _] : fj.entries())
			s.insert(v);
	for (const auto& [v, _] : g.entries())
		s.insert(v);
	return s;
}

FinSuppVec as_vector(const std::set<VertexAddr>& s)
{
	FinSuppVec v;
	for (const auto& a : s)
		v.set(a, 1);
	return v;
}

void check_support(const TreeSpec& spec, const std::set<VertexAddr>& F)
{
	for (const auto& v : F)
		spec.check(v);
}

/// Bump target for a: the descendant at distance n maximizing |λ(a→u)|, outside `avoid`.
std::optional<Desc> best_descendant(const WeightFamily& w, const TreeSpec& spec, const VertexAddr& a,
									std::int64_t n, std::int64_t budget, const std::set<VertexAddr>& avoid,
									bool& truncated)
{
	std::optional<Desc> best;
	for (auto& d : descend(w, spec, a, n, budget, truncated)) {
		if (avoid.count(d.u))
			continue;
		if (!best || std::abs(d.prod) > std::abs(best->prod))
			best = d;
	}
	return best;
}

/// Builds the part of h attached to g: single bumps (ℓ^p) or right inverses (c₀),
/// raised to the exponent s_j entrywise. Fills the report bookkeeping once.
std::vector<FinSuppVec> attach_targets(const SpaceTag& space, const WeightFamily& w, const TreeSpec& spec,
									   const FinSuppVec& g, const std::vector<double>& s,
									   const std::set<VertexAddr>& F, std::int64_t n, std::int64_t budget,
									   WitnessReport& rep, std::set<VertexAddr>& used)
{
	std::vector<FinSuppVec> parts(s.size());
	for (const auto& [a, ga] : g.entries()) {
		if (space.kind == SpaceTag::Kind::c0) {
			auto ri = right_inverse(w, spec, a, n, budget);
			rep.truncated = rep.truncated || ri.truncated;
			rep.keylemma_values.push_back(ri.keylemma_value);
			for (const auto& [u, r] : ri.R.entries()) {
				if (F.count(u) || used.count(u))
					throw NeedsLargerN(static_cast<int>(n + 1), "descendant set of " + format_address(a) +
																	  " meets the support");
				used.insert(u);
				for (std::size_t j = 0; j < s.size(); ++j)
					parts[j].add(u, principal_power(ga, s[j]) * principal_power(r, s[j]));
			}
		} else {
			std::set<VertexAddr> avoid = F;
			avoid.insert(used.begin(), used.end());
			auto best = best_descendant(w, spec, a, n, budget, avoid, rep.truncated);
			if (!best)
				throw NeedsLargerN(static_cast<int>(n + 1),
								   "no free descendant at distance " + std::to_string(n) + " of " + format_address(a));
			used.insert(best->u);
			rep.bumps.push_back({a, best->u, std::abs(best->prod)});
			for (std::size_t j = 0; j < s.size(); ++j)
				parts[j].add(best->u, principal_power(ga / best->prod, s[j]));
		}
	}
	return parts;
}

void finish_algebra(const SpaceTag& space, const WeightFamily& w, const TreeSpec& spec,
					const std::vector<FinSuppVec>& f, const FinSuppVec& g, const ExponentSolution& ex,
					std::int64_t n, WitnessReport& rep)
{
	for (std::size_t j = 0; j < f.size(); ++j)
		rep.approach_norms.push_back(norm(rep.h[j] - f[j], space));
	FinSuppVec hit = apply(w, spec, monomial(rep.h, ex.beta), n);
	rep.hit_error = norm(hit - g, space);
	for (const auto& alpha : ex.P)
		if (alpha != ex.beta)
			rep.collapse_norms.push_back({alpha, norm(apply(w, spec, monomial(rep.h, alpha), n), space)});
}

std::vector<FinSuppVec> pad(const std::vector<FinSuppVec>& f, std::size_t d)
{
	if (f.empty())
		return std::vector<FinSuppVec>(d);
	if (f.size() != d)
		fail(ErrorKind::invalid_argument, "number of vectors f_j does not match the exponent dimension");
	return f;
}

/// Runs `build` at n; on NeedsLargerN searches upward for the first n that succeeds.
template <class Build>
WitnessReport with_search(std::int64_t n, const WitnessOptions& opt, Build build)
{
	try {
		return build(n);
	} catch (const NeedsLargerN& e) {
		for (std::int64_t k = std::max<std::int64_t>(n + 1, e.minimal_n()); k <= n + opt.search; ++k) {
			bool ok = true;
			try {
				build(k);
			} catch (const NeedsLargerN&) {
				ok = false;
			}
			if (ok)
				throw NeedsLargerN(static_cast<int>(k), e.detail());
		}
		throw NeedsLargerN(static_cast<int>(n + opt.search + 1),
						   e.detail() + "; no admissible iterate found up to " +
							   std::to_string(n + opt.search));
	}
}

} // namespace

double linear_form(const Multi& alpha, const std::vector<double>& s)
{
	double acc = 0;
	for (std::size_t j = 0; j < alpha.size(); ++j)
		acc += alpha[j] * s[j];
	return acc;
}

ExponentSolution solve_exponents(const std::vector<Multi>& P)
{
	if (P.empty())
		fail(ErrorKind::invalid_argument, "exponent set is empty");
	std::size_t d = P.front().size();
	if (d == 0)
		fail(ErrorKind::invalid_argument, "exponent tuples must be nonempty");
	for (const auto& a : P) {
		if (a.size() != d)
			fail(ErrorKind::invalid_argument, "exponent tuples have different lengths");
		if (std::any_of(a.begin(), a.end(), [](int x) { return x < 0; }))
			fail(ErrorKind::invalid_argument, "exponents must be nonnegative");
		if (std::all_of(a.begin(), a.end(), [](int x) { return x == 0; }))
			fail(ErrorKind::invalid_argument, "the zero tuple is not allowed");
	}

	auto attempt = [&](const std::vector<double>& t) -> std::optional<ExponentSolution> {
		std::vector<double> L;
		for (const auto& a : P)
			L.push_back(linear_form(a, t));
		auto it = std::min_element(L.begin(), L.end());
		std::size_t b = static_cast<std::size_t>(it - L.begin());
		double lo = *it;
		for (std::size_t i = 0; i < L.size(); ++i)
			if (i != b && L[i] <= lo * (1 + 1e-9))
				return std::nullopt;
		ExponentSolution sol;
		sol.P = P;
		sol.beta = P[b];
		sol.margin = std::numeric_limits<double>::infinity();
		for (double x : t)
			sol.s.push_back(x / lo);
		for (std::size_t i = 0; i < L.size(); ++i) {
			sol.values.push_back(i == b ? 1.0 : L[i] / lo);
			if (i != b)
				sol.margin = std::min(sol.margin, L[i] / lo - 1);
		}
		if (P.size() == 1)
			sol.margin = 0;
		return sol;
	};

	for (double r : {1.0, 0.5, 1.0 / 3, 2.0, 3.0}) {
		std::vector<double> t(d);
		for (std::size_t j = 0; j < d; ++j)
			t[j] = std::pow(r, static_cast<double>(j));
		if (auto sol = attempt(t))
			return *sol;
	}
	std::mt19937_64 rng(0x5eed);
	std::uniform_real_distribution<double> dist(0.1, 10.0);
	for (int k = 0; k < 1000; ++k) {
		std::vector<double> t(d);
		for (auto& x : t)
			x = dist(rng);
		if (auto sol = attempt(t))
			return *sol;
	}
	fail(ErrorKind::degenerate_exponents, "no direction singles out a unique minimal exponent");
}

KeyLemma keylemma_optimal(const std::vector<cx>& mu)
{
	if (mu.empty())
		fail(ErrorKind::invalid_argument, "key lemma needs at least one coefficient");
	double S = 0;
	for (const auto& m : mu) {
		if (m == cx(0))
			fail(ErrorKind::invalid_argument, "key lemma coefficients must be nonzero");
		S += 1 / std::abs(m);
	}
	KeyLemma k;
	for (const auto& m : mu)
		k.x.push_back((1 / std::abs(m)) / S);
	k.value = 1 / S;
	return k;
}

RightInverse right_inverse(const WeightFamily& w, const TreeSpec& spec, const VertexAddr& a, std::int64_t n,
						   std::int64_t budget)
{
	if (n < 1)
		fail(ErrorKind::invalid_argument, "iterate must be positive");
	RightInverse out;
	auto ds = descend(w, spec, a, n, budget, out.truncated);
	prune_negligible(ds, out.truncated);
	if (ds.empty())
		fail(ErrorKind::invalid_argument, "enumeration budget too small for a right inverse");
	std::vector<cx> mu;
	out.min_weight = std::numeric_limits<double>::infinity();
	for (const auto& d : ds) {
		mu.push_back(1.0 / d.prod);
		out.min_weight = std::min(out.min_weight, std::abs(d.prod));
	}
	auto k = keylemma_optimal(mu);
	for (std::size_t i = 0; i < ds.size(); ++i)
		out.R.set(ds[i].u, k.x[i] * mu[i]);
	out.keylemma_value = k.value;
	return out;
}

std::int64_t minimal_rooted_n(const FinSuppVec& support)
{
	std::int64_t depth = 0;
	for (const auto& [v, _] : support.entries())
		depth = std::max(depth, v.generation());
	return depth + 1;
}

std::int64_t minimal_unrooted_n(const TreeSpec& spec, const FinSuppVec& support)
{
	std::int64_t far = 0;
	for (const auto& [a, _] : support.entries())
		for (const auto& [b, __] : support.entries())
			if (a != b)
				if (auto d = spec.ancestor_distance(a, b))
					far = std::max(far, *d);
	return far + 1;
}

WitnessReport build_rooted(const SpaceTag& space, const WeightFamily& w, const TreeSpec& spec,
						   const std::vector<FinSuppVec>& f_in, const FinSuppVec& g, const std::vector<Multi>& P,
						   std::int64_t n, const WitnessOptions& opt)
{
	if (!spec.rooted())
		fail(ErrorKind::invalid_argument, "rooted construction needs a rooted tree");
	w.check_tree(spec);
	ExponentSolution ex = solve_exponents(P);
	auto f = pad(f_in, ex.s.size());
	auto F = support_of(f, g);
	check_support(spec, F);
	std::int64_t nmin = minimal_rooted_n(as_vector(F));
	if (n < nmin)
		throw NeedsLargerN(static_cast<int>(nmin), "iterate must exceed the depth of the support");

	WitnessReport rep;
	rep.mode = "rooted";
	rep.space = space;
	rep.n = n;
	std::set<VertexAddr> used;
	auto parts = attach_targets(space, w, spec, g, ex.s, F, n, opt.budget, rep, used);
	for (std::size_t j = 0; j < f.size(); ++j)
		rep.h.push_back(f[j] + parts[j]);
	rep.exponents = ex;
	finish_algebra(space, w, spec, f, g, ex, n, rep);
	rep.identity_error = rep.hit_error;
	return rep;
}

WitnessReport build_unrooted_algebra(const SpaceTag& space, const WeightFamily& w, const TreeSpec& spec,
									 const std::vector<FinSuppVec>& f_in, const FinSuppVec& g,
									 const std::vector<Multi>& P, std::int64_t n, const WitnessOptions& opt)
{
	if (spec.rooted())
		fail(ErrorKind::invalid_argument, "unrooted construction needs an unrooted tree");
	w.check_tree(spec);
	ExponentSolution ex = solve_exponents(P);
	auto f = pad(f_in, ex.s.size());
	auto F = support_of(f, g);
	check_support(spec, F);
	std::int64_t nmin = minimal_unrooted_n(spec, as_vector(F));
	if (n < nmin)
		throw NeedsLargerN(static_cast<int>(nmin), "iterate must exceed every ancestor distance in the support");

	WitnessReport rep;
	rep.mode = "unrooted-algebra";
	rep.space = space;
	rep.n = n;
	std::set<VertexAddr> used;
	auto parts = attach_targets(space, w, spec, g, ex.s, F, n, opt.budget, rep, used);
	for (std::size_t j = 0; j < f.size(); ++j)
		rep.h.push_back(f[j] + parts[j]);
	rep.exponents = ex;
	finish_algebra(space, w, spec, f, g, ex, n, rep);

	FinSuppVec fb = monomial(f, ex.beta);
	FinSuppVec residual = apply(w, spec, fb, n);
	for (const auto& [a, _] : fb.entries())
		rep.f1.push_back(a);
	rep.residual_norm = norm(residual, space);
	FinSuppVec hit = apply(w, spec, monomial(rep.h, ex.beta), n);
	rep.identity_error = norm(hit - (residual + g), space);
	return rep;
}

WitnessReport build_unrooted_power(const SpaceTag& space, const WeightFamily& w, const TreeSpec& spec,
								   const FinSuppVec& f, const FinSuppVec& g, int m, std::int64_t n_req,
								   const WitnessOptions& opt)
{
	if (spec.rooted())
		fail(ErrorKind::invalid_argument, "unrooted construction needs an unrooted tree");
	if (m < 1)
		fail(ErrorKind::invalid_argument, "power must be a positive integer");
	w.check_tree(spec);
	auto F = support_of({f}, g);
	check_support(spec, F);
	std::int64_t nmin = minimal_unrooted_n(spec, as_vector(F));
	if (n_req < nmin)
		throw NeedsLargerN(static_cast<int>(nmin), "iterate must exceed every ancestor distance in the support");

	const double root_arg = std::numbers::pi / m;
	const cx rotation = std::polar(1.0, root_arg);
	const double inv_m = 1.0 / m;

	auto build = [&](std::int64_t n) {
		if (n < nmin)
			throw NeedsLargerN(static_cast<int>(nmin), "iterate below the support bound");
		WitnessReport rep;
		rep.mode = "unrooted-power";
		rep.space = space;
		rep.n = n;
		rep.m = m;

		// F₂: support points of f whose left product exceeds tau.
		std::vector<VertexAddr> F2;
		for (const auto& [a, fa] : f.entries()) {
			if (std::abs(path_product_up(w, spec, a, n)) <= opt.tau)
				rep.f1.push_back(a);
			else
				F2.push_back(a);
		}
		rep.f2 = F2;

		std::set<VertexAddr> used;
		auto parts = attach_targets(space, w, spec, g, {inv_m}, F, n, opt.budget, rep, used);
		FinSuppVec h = f + parts[0];

		std::set<VertexAddr> avoid = F;
		avoid.insert(used.begin(), used.end());
		if (space.kind == SpaceTag::Kind::c0) {
			// One representative per generation; every F₂ vertex of that
			// generation must merge with it within n steps.
			std::map<std::int64_t, std::vector<VertexAddr>> by_gen;
			for (const auto& v : F2)
				by_gen[v.generation()].push_back(v);
			for (const auto& [gen, vs] : by_gen) {
				const VertexAddr& rep_v = vs.front();
				std::int64_t M = 0;
				for (const auto& v : vs) {
					std::int64_t k = 0;
					while (spec.parent(v, k) != spec.parent(rep_v, k))
						++k;
					M = std::max(M, k);
				}
				if (n < M)
					throw NeedsLargerN(static_cast<int>(M), "generation " + std::to_string(gen) +
																 " of the support merges only after " +
																 std::to_string(M) + " steps");
				cx C = 0;
				cx lam_rep = path_product_up(w, spec, rep_v, M);
				for (const auto& v : vs)
					C += std::pow(f.at(v), m) * path_product_up(w, spec, v, M) / lam_rep;
				VertexAddr P = *spec.parent(rep_v, n);
				cx lam_P = path_product_up(w, spec, rep_v, n);
				std::vector<Desc> pool;
				for (auto& d : descend(w, spec, P, n, opt.budget, rep.truncated))
					if (!avoid.count(d.u))
						pool.push_back(d);
				prune_negligible(pool, rep.truncated);
				if (pool.empty())
					throw NeedsLargerN(static_cast<int>(n + 1), "no free vertex in the generation of " +
																	  format_address(rep_v));
				std::vector<cx> mu;
				for (const auto& d : pool)
					mu.push_back(lam_P / d.prod);
				auto k = keylemma_optimal(mu);
				rep.keylemma_values.push_back(k.value);
				cx c_root = principal_power(C, inv_m);
				for (std::size_t i = 0; i < pool.size(); ++i) {
					used.insert(pool[i].u);
					h.add(pool[i].u, rotation * c_root * principal_power(k.x[i] * mu[i], inv_m));
				}
				rep.corrections.push_back({vs, rep_v, C});
			}
		} else {
			// Group F₂ vertices by their sibling target b.
			std::map<VertexAddr, std::pair<std::vector<VertexAddr>, cx>> groups;
			for (const auto& a : F2) {
				VertexAddr P = *spec.parent(a, n);
				auto best = best_descendant(w, spec, P, n, opt.budget, avoid, rep.truncated);
				if (!best)
					throw NeedsLargerN(static_cast<int>(n + 1),
									   "no free vertex in the generation of " + format_address(a));
				auto& grp = groups[best->u];
				grp.first.push_back(a);
				grp.second += std::pow(f.at(a), m) * path_product_up(w, spec, a, n) / best->prod;
			}
			for (const auto& [b, grp] : groups) {
				used.insert(b);
				h.add(b, rotation * principal_power(grp.second, inv_m));
				rep.corrections.push_back({grp.first, b, grp.second});
			}
		}

		rep.h = {h};
		rep.approach_norms = {norm(h - f, space)};
		FinSuppVec f1_part;
		for (const auto& a : rep.f1)
			f1_part.set(a, f.at(a));
		FinSuppVec residual = apply(w, spec, int_power(f1_part, m), n);
		rep.residual_norm = norm(residual, space);
		FinSuppVec hit = apply(w, spec, int_power(h, m), n);
		rep.hit_error = norm(hit - g, space);
		FinSuppVec diff = hit - g - residual;
		rep.identity_error = norm(diff, space);
		for (const auto& a : F2) {
			VertexAddr top = *spec.parent(a, n);
			double mag = std::abs(std::pow(f.at(a), m) * path_product_up(w, spec, a, n));
			rep.cancellations.push_back({a, top, std::abs(diff.at(top)), mag});
		}
		return rep;
	};
	return with_search(n_req, opt, build);
}

} // namespace treeshift
