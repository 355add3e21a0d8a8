#include "treeshift/weights.hpp"

#include "treeshift/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

namespace treeshift {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nonzero(cx z, const char* what)
{
	if (z == cx(0) || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
		fail(ErrorKind::invalid_argument, std::string(what) + " must be a finite nonzero number");
}

double conjugate_of(double p)
{
	return p / (p - 1);
}

// Σ_{u∈Χ(v)} |λ_u|^q for the fertile rule when Χ(v) has `a` elements.
double fertile_child_sum(ChildCount a, double q, double pstar)
{
	if (a.is_infinite()) {
		double r = std::exp2(-q / pstar);
		return 2 + r / (1 - r);
	}
	auto m = a.value();
	if (m <= 2)
		return static_cast<double>(m);
	double k = static_cast<double>(m - 2);
	return 2 + k * std::pow(k, -q / pstar);
}

} // namespace

const char* to_string(WeightTag tag)
{
	switch (tag) {
	case WeightTag::rolewicz: return "rolewicz";
	case WeightTag::dyadic_counterexample: return "dyadic-counterexample";
	case WeightTag::menthe: return "menthe";
	case WeightTag::fertile_no_algebra: return "fertile-no-algebra";
	case WeightTag::bilateral_rolewicz: return "bilateral-rolewicz";
	case WeightTag::symmetric: return "symmetric";
	case WeightTag::table: return "table";
	}
	return "?";
}

WeightTag parse_weight_tag(std::string_view text)
{
	for (auto tag : {WeightTag::rolewicz, WeightTag::dyadic_counterexample, WeightTag::menthe,
					 WeightTag::fertile_no_algebra, WeightTag::bilateral_rolewicz, WeightTag::symmetric,
					 WeightTag::table})
		if (text == to_string(tag))
			return tag;
	fail(ErrorKind::invalid_argument, "unknown weight family '" + std::string(text) + "'");
}

const char* to_string(SequenceRule::Kind kind)
{
	switch (kind) {
	case SequenceRule::Kind::constant: return "constant";
	case SequenceRule::Kind::geometric: return "geometric";
	case SequenceRule::Kind::power: return "power";
	}
	return "?";
}

cx SequenceRule::at(std::int64_t i) const
{
	switch (kind) {
	case Kind::constant: return scale;
	case Kind::geometric: return scale * std::pow(rate, static_cast<double>(i));
	case Kind::power: return scale * std::pow(static_cast<double>(i), rate);
	}
	return scale;
}

double SequenceRule::sup_ratio() const
{
	switch (kind) {
	case Kind::constant: return 1;
	case Kind::geometric: return std::abs(rate);
	case Kind::power: return rate >= 0 ? std::exp2(rate) : 1.0;
	}
	return 1;
}

cx LevelWeights::at(std::int64_t gen) const
{
	if (auto it = overrides.find(gen); it != overrides.end())
		return it->second;
	return gen < split ? below : above;
}

WeightFamily::WeightFamily(WeightTag tag, WeightParams params) : tag_(tag), params_(std::move(params))
{
	std::visit(
		[](const auto& p) {
			using T = std::decay_t<decltype(p)>;
			if constexpr (std::is_same_v<T, RolewiczParams>)
				require_nonzero(p.lambda, "Rolewicz weight");
			else if constexpr (std::is_same_v<T, SymmetricParams>) {
				require_nonzero(p.levels.below, "weight below the split");
				require_nonzero(p.levels.above, "weight above the split");
				for (auto& [g, z] : p.levels.overrides)
					require_nonzero(z, "generation weight");
			}
			else if constexpr (std::is_same_v<T, TableParams>) {
				require_nonzero(p.fallback, "fallback weight");
				for (auto& [a, z] : p.entries)
					require_nonzero(z, "table weight");
			}
		},
		params_);
}

std::optional<LevelWeights> WeightFamily::level_weights() const
{
	switch (tag_) {
	case WeightTag::rolewicz: {
		auto l = as<RolewiczParams>().lambda;
		return LevelWeights{{}, l, l, 0};
	}
	case WeightTag::bilateral_rolewicz: {
		auto& b = as<BilateralParams>();
		return LevelWeights{b.middle, 1.0 / b.lambda, b.lambda, b.lo};
	}
	case WeightTag::symmetric:
		return as<SymmetricParams>().levels;
	default:
		return std::nullopt;
	}
}

cx WeightFamily::value(const TreeSpec& spec, const VertexAddr& v) const
{
	switch (tag_) {
	case WeightTag::rolewicz:
		return as<RolewiczParams>().lambda;
	case WeightTag::bilateral_rolewicz:
	case WeightTag::symmetric:
		return level_weights()->at(v.generation());
	case WeightTag::dyadic_counterexample: {
		if (v.path.empty())
			return 1;
		double t_parent = 1;
		for (std::size_t j = 0; j + 1 < v.path.size(); ++j)
			t_parent = v.path[j] == 1 ? 2 * t_parent - 1 : 2 * t_parent;
		double t = v.path.back() == 1 ? 2 * t_parent - 1 : 2 * t_parent;
		return std::pow(t_parent / t, as<DyadicParams>().alpha);
	}
	case WeightTag::menthe: {
		if (v.path.empty())
			return 1;
		auto& m = as<MentheParams>();
		auto j = static_cast<std::int64_t>(v.path.size());
		if (j == 1)
			return m.alpha.at(v.path[0]) * m.beta.at(1);
		return m.beta.at(j) / m.beta.at(j - 1);
	}
	case WeightTag::fertile_no_algebra: {
		if (spec.rooted() && v.path.empty())
			return 1;
		auto parent = spec.parent(v, 1);
		auto a = spec.arity(*parent);
		auto l = spec.canonical(v) == v && !v.path.empty() ? v.path.back() : spec.spine_index(v.ascent + 1);
		if (l <= 2 || (!a.is_infinite() && a.value() <= 2))
			return 1;
		double pstar = conjugate_of(as<FertileParams>().p);
		if (a.is_infinite())
			return std::exp2(-static_cast<double>(l - 2) / pstar);
		return std::pow(static_cast<double>(a.value() - 2), -1.0 / pstar);
	}
	case WeightTag::table: {
		auto& t = as<TableParams>();
		if (auto it = t.entries.find(v); it != t.entries.end())
			return it->second;
		return t.fallback;
	}
	}
	return 1;
}

std::optional<double> WeightFamily::tail_oracle(const TreeSpec& spec, const VertexAddr& v, double q) const
{
	if (!spec.arity(v).is_infinite())
		return std::nullopt;
	switch (tag_) {
	case WeightTag::rolewicz:
	case WeightTag::bilateral_rolewicz:
	case WeightTag::symmetric:
		return kInf;
	case WeightTag::menthe: {
		if (!v.path.empty())
			return std::nullopt;
		auto& m = as<MentheParams>();
		double r = std::pow(std::abs(m.alpha.rate), q);
		return std::pow(std::abs(m.beta.at(1)) * std::abs(m.alpha.scale), q) * r / (1 - r);
	}
	case WeightTag::fertile_no_algebra:
		return fertile_child_sum(ChildCount::infinite(), q, conjugate_of(as<FertileParams>().p));
	default:
		return std::nullopt;
	}
}

void WeightFamily::check_tree(const TreeSpec& spec) const
{
	switch (tag_) {
	case WeightTag::dyadic_counterexample:
		if (!(spec.rooted() && spec.shape() == TreeShape::n_adic && spec.adic() == 2))
			fail(ErrorKind::invalid_argument, "the dyadic counterexample lives on the rooted dyadic tree");
		break;
	case WeightTag::menthe:
		if (spec.shape() != TreeShape::menthe)
			fail(ErrorKind::invalid_argument, "menthe weights need the menthe tree");
		break;
	case WeightTag::fertile_no_algebra:
		if (!spec.rooted() || find_fertile(spec, 8).kind != FertilityVerdict::Kind::fertile)
			fail(ErrorKind::unsupported_construction,
				 "the construction is implemented only when the root is provably fertile");
		break;
	case WeightTag::bilateral_rolewicz:
		if (spec.rooted() || !spec.has_free_left_end())
			fail(ErrorKind::invalid_argument, "bilateral Rolewicz weights need an unrooted tree with a free left end");
		break;
	default:
		break;
	}
}

WeightFamily make_rolewicz(cx lambda)
{
	if (lambda == cx(0))
		fail(ErrorKind::invalid_argument, "Rolewicz weight must be nonzero");
	return WeightFamily(WeightTag::rolewicz, RolewiczParams{lambda});
}

WeightFamily make_dyadic_counterexample(double p, std::optional<std::int64_t> m0, std::optional<double> alpha)
{
	if (!(p > 1) || !std::isfinite(p))
		fail(ErrorKind::invalid_argument, "the dyadic counterexample needs 1 < p < infinity");
	double top = (p - 1) / p;
	std::int64_t m = 0;
	if (m0) {
		m = *m0;
		if (m < 1 || !(p / static_cast<double>(m) < top))
			fail(ErrorKind::invalid_argument,
				 "m0 must satisfy p/m0 < (p-1)/p, i.e. m0 > " + std::to_string(p * p / (p - 1)));
	}
	else {
		m = static_cast<std::int64_t>(std::floor(p * p / (p - 1))) + 1;
		while (!(p / static_cast<double>(m) < top))
			++m;
	}
	double bottom = p / static_cast<double>(m);
	double a = alpha.value_or((bottom + top) / 2);
	if (!(a > bottom && a < top))
		fail(ErrorKind::invalid_argument,
			 "alpha must lie in the open interval (" + std::to_string(bottom) + ", " + std::to_string(top) + ")");
	return WeightFamily(WeightTag::dyadic_counterexample, DyadicParams{p, m, a});
}

WeightFamily make_menthe(SequenceRule alpha, SequenceRule beta)
{
	if (alpha.kind != SequenceRule::Kind::geometric)
		fail(ErrorKind::invalid_argument, "menthe alpha sequence must be geometric (closed-form tail sums)");
	if (!(std::abs(alpha.rate) > 0 && std::abs(alpha.rate) < 1))
		fail(ErrorKind::invalid_argument, "menthe alpha rate must satisfy 0 < |rate| < 1");
	require_nonzero(alpha.scale, "menthe alpha scale");
	require_nonzero(beta.scale, "menthe beta scale");
	if (beta.kind == SequenceRule::Kind::geometric && beta.rate == 0)
		fail(ErrorKind::invalid_argument, "menthe beta rate must be nonzero");
	return WeightFamily(WeightTag::menthe, MentheParams{alpha, beta});
}

WeightFamily make_fertile_no_algebra(const TreeSpec& spec, double p)
{
	if (!(p > 1) || !std::isfinite(p))
		fail(ErrorKind::invalid_argument, "the fertile construction needs 1 < p < infinity");
	WeightFamily w(WeightTag::fertile_no_algebra, FertileParams{p});
	w.check_tree(spec);
	return w;
}

WeightFamily make_bilateral_rolewicz(const TreeSpec& spec, cx lambda, std::int64_t lo, std::int64_t hi,
									 std::map<std::int64_t, cx> middle)
{
	if (!(std::abs(lambda) > 1))
		fail(ErrorKind::invalid_argument, "bilateral Rolewicz weights need |lambda| > 1");
	if (hi < lo)
		fail(ErrorKind::invalid_argument, "middle block needs lo <= hi");
	for (auto g = lo; g <= hi; ++g) {
		auto it = middle.find(g);
		if (it == middle.end())
			fail(ErrorKind::invalid_argument, "missing middle weight for generation " + std::to_string(g));
		require_nonzero(it->second, "middle weight");
	}
	std::erase_if(middle, [&](const auto& kv) { return kv.first < lo || kv.first > hi; });
	WeightFamily w(WeightTag::bilateral_rolewicz, BilateralParams{lambda, lo, hi, std::move(middle)});
	w.check_tree(spec);
	return w;
}

WeightFamily make_symmetric(LevelWeights levels)
{
	return WeightFamily(WeightTag::symmetric, SymmetricParams{std::move(levels)});
}

WeightFamily make_table(std::map<VertexAddr, cx> entries, cx fallback)
{
	return WeightFamily(WeightTag::table, TableParams{std::move(entries), fallback});
}

std::uint64_t theta(const std::vector<std::int64_t>& path)
{
	if (path.empty())
		fail(ErrorKind::invalid_argument, "theta needs a nonempty index");
	if (path.size() > 63)
		fail(ErrorKind::invalid_argument, "theta index longer than 63 does not fit 64 bits");
	std::uint64_t t = 1;
	for (auto i : path) {
		if (i != 1 && i != 2)
			fail(ErrorKind::invalid_argument, "theta indices take values in {1,2}");
		t = i == 1 ? 2 * t - 1 : 2 * t;
	}
	return t;
}

cx path_product_up(const WeightFamily& w, const TreeSpec& spec, const VertexAddr& u, std::int64_t n)
{
	if (n < 0)
		fail(ErrorKind::invalid_argument, "path length must be nonnegative");
	if (spec.rooted() && n > static_cast<std::int64_t>(u.path.size()))
		fail(ErrorKind::not_an_ancestor, "vertex " + format_address(u) + " has no ancestor " + std::to_string(n)
											 + " levels up");
	auto levels = w.level_weights();
	auto factor = [&, cur = u](std::int64_t i) mutable {
		if (levels)
			return levels->at(u.generation() - i);
		cx z = w.value(spec, cur);
		if (!cur.path.empty())
			cur.path.pop_back();
		else
			++cur.ascent;
		return z;
	};
	if (n <= 1000) {
		cx prod = 1;
		for (std::int64_t i = 0; i < n; ++i)
			prod *= factor(i);
		return prod;
	}
	// Long products: accumulate log-modulus and phase separately.
	double log_mod = 0, phase = 0;
	for (std::int64_t i = 0; i < n; ++i) {
		cx z = factor(i);
		log_mod += std::log(std::abs(z));
		phase += std::arg(z);
	}
	return std::polar(std::exp(log_mod), std::remainder(phase, 2 * M_PI));
}

cx path_product(const WeightFamily& w, const TreeSpec& spec, const VertexAddr& v, const VertexAddr& u)
{
	auto d = spec.ancestor_distance(v, u);
	if (!d)
		fail(ErrorKind::not_an_ancestor, format_address(v) + " is not an ancestor of " + format_address(u));
	return path_product_up(w, spec, u, *d);
}

namespace {

struct LevelSup
{
	double value = 0;
	bool unbounded = false;
};

// Generations at which a level-indexed quantity can change, plus one
// representative of each constant tail.
std::vector<std::int64_t> candidate_generations(const TreeSpec& spec, const LevelWeights* lw)
{
	std::set<std::int64_t> keys;
	auto add = [&](std::int64_t k) {
		for (auto d : {-1, 0, 1})
			keys.insert(k + d);
	};
	add(0);
	if (spec.shape() == TreeShape::levels) {
		add(spec.level_arity().split);
		for (auto& [g, c] : spec.level_arity().overrides)
			add(g);
	}
	if (lw) {
		add(lw->split);
		for (auto& [g, z] : lw->overrides)
			add(g);
	}
	std::vector<std::int64_t> out(keys.begin(), keys.end());
	out.push_back(*keys.begin() - 2);
	out.push_back(*keys.rbegin() + 2);
	std::sort(out.begin(), out.end());
	return out;
}

ChildCount level_arity_at(const TreeSpec& spec, std::int64_t gen)
{
	if (spec.shape() == TreeShape::n_adic)
		return spec.adic();
	return spec.level_arity().at(gen);
}

double child_sum_power(double modulus, ChildCount a, double q)
{
	if (a.is_infinite())
		return kInf;
	return static_cast<double>(a.value()) * std::pow(modulus, q);
}

NormReport finish(double sup_sum, const SpaceTag& space, std::string method)
{
	NormReport r;
	r.exact = true;
	r.method = std::move(method);
	r.unbounded = !std::isfinite(sup_sum);
	if (r.unbounded)
		r.value = kInf;
	else if (space.kind == SpaceTag::Kind::lp)
		r.value = std::pow(sup_sum, 1 / space.conjugate());
	else
		r.value = sup_sum;
	return r;
}

std::optional<NormReport> symmetric_norm(const LevelWeights& lw, const TreeSpec& spec, const SpaceTag& space)
{
	const bool rooted = spec.rooted();
	auto gens = candidate_generations(spec, &lw);
	if (rooted)
		std::erase_if(gens, [](std::int64_t g) { return g < 1; });
	if (rooted && gens.empty())
		gens.push_back(1);

	if (space.kind == SpaceTag::Kind::l1) {
		double sup = 0;
		for (auto g : gens)
			sup = std::max(sup, std::abs(lw.at(g)));
		return finish(sup, space, "closed-form");
	}
	double q = space.kind == SpaceTag::Kind::lp ? space.conjugate() : 1.0;
	if (spec.level_regular()) {
		double sup = 0;
		for (auto g : gens)
			sup = std::max(sup, child_sum_power(std::abs(lw.at(g)), level_arity_at(spec, g - 1), q));
		return finish(sup, space, "closed-form");
	}
	if (spec.shape() == TreeShape::menthe || spec.shape() == TreeShape::staircase)
		return finish(kInf, space, "closed-form: unbounded arity");
	return std::nullopt;
}

std::optional<NormReport> closed_norm(const WeightFamily& w, const TreeSpec& spec, const SpaceTag& space)
{
	if (auto lw = w.level_weights())
		return symmetric_norm(*lw, spec, space);

	const bool l1 = space.kind == SpaceTag::Kind::l1;
	const double q = space.kind == SpaceTag::Kind::lp ? space.conjugate() : 1.0;
	switch (w.tag()) {
	case WeightTag::dyadic_counterexample: {
		double alpha = w.as<DyadicParams>().alpha;
		if (l1)
			return finish(1, space, "closed-form");
		return finish(1 + std::exp2(-alpha * q), space, "closed-form");
	}
	case WeightTag::menthe: {
		auto& m = w.as<MentheParams>();
		double ratio = m.beta.sup_ratio();
		if (l1) {
			double first = std::abs(m.alpha.scale) * std::abs(m.alpha.rate) * std::abs(m.beta.at(1));
			return finish(std::max(first, ratio), space, "closed-form");
		}
		double root = *w.tail_oracle(spec, VertexAddr::anchor(), q);
		return finish(std::max(root, std::pow(ratio, q)), space, "closed-form");
	}
	case WeightTag::fertile_no_algebra: {
		if (l1)
			return finish(1, space, "closed-form");
		if (!spec.level_regular())
			return std::nullopt;
		double pstar = w.as<FertileParams>().p / (w.as<FertileParams>().p - 1);
		double sup = 0;
		for (auto g : candidate_generations(spec, nullptr))
			if (g >= 0)
				sup = std::max(sup, fertile_child_sum(level_arity_at(spec, g), q, pstar));
		return finish(sup, space, "closed-form");
	}
	default:
		return std::nullopt;
	}
}

} // namespace

NormReport operator_norm_budgeted(const WeightFamily& w, const TreeSpec& spec, const SpaceTag& space,
								  std::int64_t budget)
{
	if (budget <= 0)
		fail(ErrorKind::invalid_argument, "budget must be positive");
	constexpr std::int64_t kChildCap = 4096;
	constexpr std::int64_t kInfiniteCap = 256;
	constexpr double kOverflow = 1e300;
	const double q = space.kind == SpaceTag::Kind::lp ? space.conjugate() : 1.0;

	NormReport r;
	r.method = "budgeted";
	double sup = 0;
	std::set<VertexAddr> seen;
	std::deque<VertexAddr> queue;
	auto push = [&](VertexAddr v) {
		if (seen.insert(v).second)
			queue.push_back(std::move(v));
	};
	push(VertexAddr::anchor());
	while (!queue.empty() && r.examined < budget) {
		auto v = queue.front();
		queue.pop_front();
		++r.examined;
		auto a = spec.arity(v);
		std::optional<double> tail;
		if (a.is_infinite() && space.kind != SpaceTag::Kind::l1)
			tail = w.tail_oracle(spec, v, q);
		double sum = 0, top = 0;
		std::int64_t listed = 0;
		std::int64_t cap = a.is_infinite() ? kInfiniteCap : kChildCap;
		if (tail)
			cap = std::min<std::int64_t>(cap, budget - r.examined - static_cast<std::int64_t>(queue.size()));
		for (std::int64_t i = 1; a.admits(i) && i <= cap; ++i) {
			auto u = spec.child(v, i);
			double m = std::abs(w.value(spec, u));
			sum += std::pow(m, q);
			top = std::max(top, m);
			++listed;
			if (r.examined + static_cast<std::int64_t>(queue.size()) < budget)
				push(std::move(u));
		}
		if (tail)
			sum = *tail;
		sup = std::max(sup, space.kind == SpaceTag::Kind::l1 ? top : sum);
		if (!(sup <= kOverflow)) {
			r.unbounded = true;
			r.value = kInf;
			return r;
		}
		if (!spec.rooted())
			if (auto p = spec.parent(v, 1))
				push(std::move(*p));
	}
	r.value = space.kind == SpaceTag::Kind::lp ? std::pow(sup, 1 / q) : sup;
	return r;
}

NormReport operator_norm(const WeightFamily& w, const TreeSpec& spec, const SpaceTag& space, std::int64_t budget)
{
	if (auto r = closed_norm(w, spec, space))
		return *r;
	return operator_norm_budgeted(w, spec, space, budget);
}

} // namespace treeshift
