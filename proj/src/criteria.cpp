#include "treeshift/criteria.hpp"

#include "treeshift/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace treeshift {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Measured exact(double v)
{
	return {v, true, false};
}

// Eventual growth rate of |Χ^n(v)| as n→∞, for trees where it is known.
std::optional<double> growth_factor(const TreeSpec& spec, const VertexAddr& v)
{
	switch (spec.shape()) {
	case TreeShape::n_adic:
		return static_cast<double>(spec.adic());
	case TreeShape::levels: {
		auto a = spec.level_arity().above;
		return a.is_infinite() ? kInf : static_cast<double>(a.value());
	}
	case TreeShape::staircase:
		return spec.staircase_level(v) ? 2.0 : 1.0;
	case TreeShape::menthe:
		return v.path.empty() ? kInf : 1.0;
	default:
		return std::nullopt;
	}
}

double level_sup(const LevelWeights& lw, std::int64_t gen, std::int64_t n)
{
	double log_mod = 0;
	for (std::int64_t i = 1; i <= n; ++i)
		log_mod += std::log(std::abs(lw.at(gen + i)));
	return std::exp(log_mod);
}

double fertile_level_sum(ChildCount a, double q, double pstar)
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

ChildCount level_arity(const TreeSpec& spec, std::int64_t gen)
{
	if (spec.shape() == TreeShape::n_adic)
		return spec.adic();
	return spec.level_arity().at(gen);
}

// Closed forms for sup (q absent) or Σ|·|^q over Χ^n(v).
std::optional<double> closed(const WeightFamily& w, const TreeSpec& spec, const VertexAddr& v, std::int64_t n,
							 std::optional<double> q)
{
	if (auto lw = w.level_weights()) {
		double sup = level_sup(*lw, v.generation(), n);
		if (!q)
			return sup;
		auto count = count_descendants(spec, v, n);
		if (!count)
			return std::nullopt;
		if (std::isinf(*count))
			return kInf;
		return *count * std::pow(sup, *q);
	}
	switch (w.tag()) {
	case WeightTag::dyadic_counterexample: {
		double alpha = w.as<DyadicParams>().alpha;
		double t = v.path.empty() ? 1.0 : static_cast<double>(theta(v.path));
		double M = std::exp2(static_cast<double>(n));
		if (!q)
			return std::pow(t / (M * (t - 1) + 1), alpha);
		double s = alpha * *q;
		return std::pow(t, s) * shifted_power_sum(M * (t - 1), M, s);
	}
	case WeightTag::menthe: {
		auto& m = w.as<MentheParams>();
		if (v.path.empty()) {
			double beta = std::abs(m.beta.at(n));
			double c = std::abs(m.alpha.scale), r = std::abs(m.alpha.rate);
			if (!q)
				return beta * c * r;
			double rq = std::pow(r, *q);
			return std::pow(beta * c, *q) * rq / (1 - rq);
		}
		auto j = static_cast<std::int64_t>(v.path.size());
		double ratio = std::abs(m.beta.at(j + n)) / std::abs(m.beta.at(j));
		return q ? std::pow(ratio, *q) : ratio;
	}
	case WeightTag::fertile_no_algebra: {
		if (!q)
			return 1.0;
		if (!spec.level_regular())
			return std::nullopt;
		double p = w.as<FertileParams>().p;
		double pstar = p / (p - 1);
		double prod = 1;
		for (std::int64_t i = 0; i < n; ++i)
			prod *= fertile_level_sum(level_arity(spec, v.generation() + i), *q, pstar);
		return prod;
	}
	default:
		return std::nullopt;
	}
}

Measured budgeted(const WeightFamily& w, const TreeSpec& spec, const VertexAddr& v, std::int64_t n,
				  std::optional<double> q, std::int64_t budget)
{
	if (budget <= 0)
		fail(ErrorKind::invalid_argument, "budget must be positive");
	std::vector<double> prod(static_cast<std::size_t>(n) + 1, 1.0);
	double acc = 0;
	bool complete = walk_subtree(spec, v, n, budget, [&](const VertexAddr& u, std::int64_t depth) {
		if (depth == 0)
			return true;
		prod[depth] = prod[depth - 1] * std::abs(w.value(spec, u));
		if (depth == n)
			acc = q ? acc + std::pow(prod[depth], *q) : std::max(acc, prod[depth]);
		return true;
	});
	return {acc, false, !complete};
}

} // namespace

double shifted_power_sum(double c, double M, double s)
{
	if (!(c >= 0) || !(M >= 1) || !(s > 0))
		fail(ErrorKind::invalid_argument, "shifted power sum needs c >= 0, M >= 1, s > 0");
	constexpr double kDirect = 32;
	auto f = [&](double k) { return std::pow(c + k, -s); };
	double direct_end = std::min(M, kDirect);
	double sum = 0;
	for (double k = 1; k <= direct_end; ++k)
		sum += f(k);
	if (M <= kDirect)
		return sum;
	// Euler–Maclaurin on [a, b] = [kDirect+1, M].
	double a = c + kDirect + 1, b = c + M;
	double one_minus_s = 1 - s;
	double log_ratio = std::log(b / a);
	double integral = one_minus_s == 0 ? log_ratio
									   : std::pow(a, one_minus_s) * std::expm1(one_minus_s * log_ratio) / one_minus_s;
	sum += integral + (std::pow(a, -s) + std::pow(b, -s)) / 2;
	// f^{(r)}(x) = (-1)^r s(s+1)...(s+r-1) x^{-s-r}; B_2/2!, B_4/4!, B_6/6!, B_8/8!.
	static constexpr double kB[] = {1.0 / 12, -1.0 / 720, 1.0 / 30240, -1.0 / 1209600};
	double rising = s; // s(s+1)...(s+r-1) for r = 1
	for (int j = 1; j <= 4; ++j) {
		int r = 2 * j - 1;
		double da = -rising * std::pow(a, -s - r);
		double db = -rising * std::pow(b, -s - r);
		sum += kB[j - 1] * (db - da);
		rising *= (s + r) * (s + r + 1);
	}
	return sum;
}

Measured crit_sup_budgeted(const WeightFamily& w, const TreeSpec& spec, const VertexAddr& v, std::int64_t n,
						   std::int64_t budget)
{
	return budgeted(w, spec, v, n, std::nullopt, budget);
}

Measured crit_sum_budgeted(const WeightFamily& w, const TreeSpec& spec, const VertexAddr& v, std::int64_t n,
						   double q, std::int64_t budget)
{
	return budgeted(w, spec, v, n, q, budget);
}

Measured crit_sup(const WeightFamily& w, const TreeSpec& spec, const VertexAddr& v, std::int64_t n,
				  std::int64_t budget)
{
	if (n < 0)
		fail(ErrorKind::invalid_argument, "n must be nonnegative");
	if (auto c = closed(w, spec, v, n, std::nullopt))
		return exact(*c);
	return crit_sup_budgeted(w, spec, v, n, budget);
}

Measured crit_sum(const WeightFamily& w, const TreeSpec& spec, const VertexAddr& v, std::int64_t n, double q,
				  std::int64_t budget)
{
	if (n < 0)
		fail(ErrorKind::invalid_argument, "n must be nonnegative");
	if (!(q > 0))
		fail(ErrorKind::invalid_argument, "exponent q must be positive");
	if (auto c = closed(w, spec, v, n, q))
		return exact(*c);
	return crit_sum_budgeted(w, spec, v, n, q, budget);
}

cx crit_left(const WeightFamily& w, const TreeSpec& spec, const VertexAddr& v, std::int64_t n)
{
	if (spec.rooted())
		fail(ErrorKind::unsupported, "the left product is defined on unrooted trees");
	return path_product_up(w, spec, v, n);
}

RatioMeasured crit_ratio(const WeightFamily& w, const TreeSpec& spec, const VertexAddr& v, std::int64_t n,
						 RatioMode mode, std::int64_t budget)
{
	if (spec.rooted())
		fail(ErrorKind::unsupported, "the ratio criterion is defined on unrooted trees");
	double left = std::abs(crit_left(w, spec, v, n));
	auto top = *spec.parent(v, n);
	auto m = mode == RatioMode::sup ? crit_sup(w, spec, top, n, budget) : crit_sum(w, spec, top, n, 1.0, budget);
	RatioMeasured r;
	r.ratio = m.value / left;
	r.companion = 1 / left;
	r.value = std::max(r.ratio, r.companion);
	r.exact = m.exact;
	r.truncated = m.truncated;
	return r;
}

const char* to_string(Theorem t)
{
	switch (t) {
	case Theorem::rooted_hc_l1: return "rooted-hc-l1";
	case Theorem::rooted_hc_lp: return "rooted-hc-lp";
	case Theorem::rooted_hc_c0: return "rooted-hc-c0";
	case Theorem::rooted_algebra_iv: return "rooted-algebra-iv";
	case Theorem::unrooted_v: return "unrooted-v";
	case Theorem::unrooted_c0: return "unrooted-c0";
	case Theorem::symmetric: return "symmetric";
	case Theorem::free_left_end: return "free-left-end";
	}
	return "?";
}

Theorem parse_theorem(std::string_view text)
{
	for (auto t : {Theorem::rooted_hc_l1, Theorem::rooted_hc_lp, Theorem::rooted_hc_c0, Theorem::rooted_algebra_iv,
				   Theorem::unrooted_v, Theorem::unrooted_c0, Theorem::symmetric, Theorem::free_left_end})
		if (text == to_string(t))
			return t;
	fail(ErrorKind::invalid_argument, "unknown theorem '" + std::string(text) + "'");
}

bool theorem_is_rooted(Theorem t)
{
	switch (t) {
	case Theorem::rooted_hc_l1:
	case Theorem::rooted_hc_lp:
	case Theorem::rooted_hc_c0:
	case Theorem::rooted_algebra_iv:
		return true;
	default:
		return false;
	}
}

const char* to_string(VerdictKind k)
{
	switch (k) {
	case VerdictKind::exact_divergence: return "ExactDivergence";
	case VerdictKind::diverges_up_to_horizon: return "DivergesUpToHorizon";
	case VerdictKind::stalled_below: return "StalledBelow";
	}
	return "?";
}

std::vector<VertexAddr> default_probes(const TreeSpec& spec, std::int64_t cap, bool* truncated)
{
	std::vector<VertexAddr> out;
	bool cut = false;
	for (std::int64_t g = spec.rooted() ? 0 : -3; g <= 3; ++g) {
		auto remaining = cap - static_cast<std::int64_t>(out.size());
		if (remaining <= 0) {
			cut = true;
			break;
		}
		auto e = generation(spec, g, remaining);
		out.insert(out.end(), e.vertices.begin(), e.vertices.end());
		cut = cut || e.truncated;
	}
	if (truncated)
		*truncated = cut;
	return out;
}

namespace {

enum class Part { sup, sum_pstar, sum_one, ratio_sup, ratio_sum, inverse_left };

// The theorem's condition as a conjunction of parts that must all diverge.
std::vector<Part> parts_of(Theorem t, const SpaceTag& space)
{
	switch (t) {
	case Theorem::rooted_hc_l1: return {Part::sup};
	case Theorem::rooted_hc_lp: return {Part::sum_pstar};
	case Theorem::rooted_hc_c0: return {Part::sum_one};
	case Theorem::rooted_algebra_iv: return {Part::sup};
	case Theorem::unrooted_v: return {Part::sup, Part::ratio_sup};
	case Theorem::unrooted_c0: return {Part::sum_one, Part::ratio_sum};
	case Theorem::symmetric:
	case Theorem::free_left_end:
		return {space.kind == SpaceTag::Kind::c0 ? Part::sum_one : Part::sup, Part::inverse_left};
	}
	return {};
}

const char* part_name(Part p)
{
	switch (p) {
	case Part::sup: return "sup |lambda(v->u)|";
	case Part::sum_pstar: return "sum |lambda(v->u)|^p*";
	case Part::sum_one: return "sum |lambda(v->u)|";
	case Part::ratio_sup: return "max(1/|left|, sup ratio)";
	case Part::ratio_sum: return "max(1/|left|, sum ratio)";
	case Part::inverse_left: return "1/|lambda(Par^n(v)->v)|";
	}
	return "?";
}

Measured part_value(Part p, const SpaceTag& space, const WeightFamily& w, const TreeSpec& spec,
					const VertexAddr& v, std::int64_t n, std::int64_t budget)
{
	switch (p) {
	case Part::sup: return crit_sup(w, spec, v, n, budget);
	case Part::sum_pstar: return crit_sum(w, spec, v, n, space.conjugate(), budget);
	case Part::sum_one: return crit_sum(w, spec, v, n, 1.0, budget);
	case Part::ratio_sup:
	case Part::ratio_sum: {
		auto r = crit_ratio(w, spec, v, n, p == Part::ratio_sup ? RatioMode::sup : RatioMode::sum, budget);
		return {r.value, r.exact, r.truncated};
	}
	case Part::inverse_left: return exact(1 / std::abs(crit_left(w, spec, v, n)));
	}
	return {};
}

std::optional<std::string> part_certificate(Part p, const SpaceTag& space, const WeightFamily& w,
											const TreeSpec& spec, const VertexAddr& v)
{
	auto lw = w.level_weights();
	auto left = [&]() -> std::optional<std::string> {
		if (lw && std::abs(lw->below) < 1)
			return std::string("left products decay geometrically (|weight below| < 1)");
		return std::nullopt;
	};
	switch (p) {
	case Part::sup:
		if (lw && std::abs(lw->above) > 1)
			return std::string("constant generation weight of modulus > 1 above the last override");
		if (w.tag() == WeightTag::menthe) {
			auto& b = w.as<MentheParams>().beta;
			if ((b.kind == SequenceRule::Kind::power && b.rate > 0)
				|| (b.kind == SequenceRule::Kind::geometric && std::abs(b.rate) > 1))
				return std::string("|beta_n| -> infinity");
		}
		return std::nullopt;
	case Part::sum_pstar:
	case Part::sum_one: {
		if (p == Part::sum_pstar && space.kind != SpaceTag::Kind::lp)
			return std::nullopt;
		double q = p == Part::sum_one ? 1.0 : space.conjugate();
		if (lw) {
			auto g = growth_factor(spec, v);
			if (g && (std::isinf(*g) || *g * std::pow(std::abs(lw->above), q) > 1))
				return std::string("descendant growth times |weight|^q exceeds 1");
			return std::nullopt;
		}
		switch (w.tag()) {
		case WeightTag::menthe:
			return part_certificate(Part::sup, space, w, spec, v);
		case WeightTag::fertile_no_algebra:
			if (find_fertile(spec, 8).kind == FertilityVerdict::Kind::fertile)
				return std::string("level sums are >= 2 on a fertile tree");
			return std::nullopt;
		default:
			return std::nullopt;
		}
	}
	case Part::inverse_left:
	case Part::ratio_sup:
		return left();
	case Part::ratio_sum: {
		if (auto l = left())
			return l;
		if (lw && spec.level_regular() && spec.shape() == TreeShape::levels) {
			auto below = spec.level_arity().below;
			if (below.is_infinite() || below.value() >= 2)
				return std::string("symmetric weights: ratio sum counts |Chi^n(Par^n(v))|, which grows");
		}
		return std::nullopt;
	}
	}
	return std::nullopt;
}

void check_theorem(Theorem t, const SpaceTag& space, const TreeSpec& spec)
{
	if (theorem_is_rooted(t) != spec.rooted())
		fail(ErrorKind::invalid_argument, std::string("theorem ") + to_string(t) + " needs a "
											  + (theorem_is_rooted(t) ? "rooted" : "unrooted") + " tree");
	if (t == Theorem::rooted_hc_lp && space.kind != SpaceTag::Kind::lp)
		fail(ErrorKind::invalid_argument, "rooted-hc-lp needs an l^p space with 1 < p < infinity");
	if (t == Theorem::free_left_end && !spec.has_free_left_end())
		fail(ErrorKind::invalid_argument, "free-left-end needs a tree with a free left end");
}

} // namespace

Measured theorem_quantity(Theorem t, const SpaceTag& space, const WeightFamily& w, const TreeSpec& spec,
						  const VertexAddr& v, std::int64_t n, std::int64_t budget)
{
	check_theorem(t, space, spec);
	Measured out{kInf, true, false};
	for (auto p : parts_of(t, space)) {
		auto m = part_value(p, space, w, spec, v, n, budget);
		out.value = std::min(out.value, m.value);
		out.exact = out.exact && m.exact;
		out.truncated = out.truncated || m.truncated;
	}
	return out;
}

std::optional<std::string> divergence_certificate(Theorem t, const SpaceTag& space, const WeightFamily& w,
												  const TreeSpec& spec, const VertexAddr& v)
{
	std::string out;
	for (auto p : parts_of(t, space)) {
		auto c = part_certificate(p, space, w, spec, v);
		if (!c)
			return std::nullopt;
		if (out.find(*c) == std::string::npos)
			out += (out.empty() ? "" : "; ") + *c;
	}
	return out;
}

CriterionReport assemble_verdict(Theorem t, const SpaceTag& space, const WeightFamily& w, const TreeSpec& spec,
								 const std::vector<VertexAddr>& probes, const CriterionOptions& opt)
{
	check_theorem(t, space, spec);
	if (probes.empty())
		fail(ErrorKind::invalid_argument, "need at least one probe vertex");
	if (opt.horizon < 1)
		fail(ErrorKind::invalid_argument, "horizon must be at least 1");

	CriterionReport r;
	r.theorem = t;
	r.space = space;
	r.probes = probes;
	r.horizon = opt.horizon;
	r.threshold = opt.threshold;
	for (auto p : parts_of(t, space))
		r.quantity += (r.quantity.empty() ? "" : " and ") + std::string(part_name(p));
	if (t == Theorem::unrooted_v || t == Theorem::unrooted_c0)
		r.note = "necessary conditions";

	for (std::int64_t n = 1; n <= opt.horizon; ++n) {
		double lo = kInf;
		for (auto& v : probes) {
			auto m = theorem_quantity(t, space, w, spec, v, n, opt.budget);
			r.table.push_back({v, n, m.value, m.exact, m.truncated});
			lo = std::min(lo, m.value);
		}
		r.min_per_n.push_back(lo);
	}

	double best = -kInf;
	for (std::size_t i = 0; i < r.min_per_n.size(); ++i)
		if (r.min_per_n[i] > best) {
			best = r.min_per_n[i];
			r.witness.push_back(static_cast<std::int64_t>(i) + 1);
		}

	std::string cert;
	bool all = true;
	for (auto& v : probes) {
		auto c = divergence_certificate(t, space, w, spec, v);
		if (!c) {
			all = false;
			break;
		}
		if (cert.find(*c) == std::string::npos)
			cert += (cert.empty() ? "" : "; ") + *c;
	}
	if (all) {
		r.verdict = VerdictKind::exact_divergence;
		r.certificate = cert;
	}
	else if (best > opt.threshold) {
		r.verdict = VerdictKind::diverges_up_to_horizon;
	}
	else {
		r.verdict = VerdictKind::stalled_below;
		r.witness.clear();
		// Χ^0(v) = {v} gives the value 1 at n = 0.
		r.bound = std::max(1.0, best);
	}
	return r;
}

} // namespace treeshift
