#include "treeshift/io.hpp"

#include "treeshift/error.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace treeshift {

namespace {

json count_json(ChildCount c)
{
	if (c.is_infinite())
		return "inf";
	return c.value();
}

ChildCount count_from_json(const json& j)
{
	if (j.is_string() && j.get<std::string>() == "inf")
		return ChildCount::infinite();
	if (!j.is_number_integer() || j.get<std::int64_t>() < 1)
		fail(ErrorKind::invalid_argument, "child count must be a positive integer or \"inf\"");
	return j.get<std::int64_t>();
}

std::int64_t int_key(const std::string& key)
{
	std::size_t used = 0;
	std::int64_t v = 0;
	try {
		v = std::stoll(key, &used);
	} catch (const std::exception&) {
		used = 0;
	}
	if (used != key.size() || key.empty())
		fail(ErrorKind::invalid_argument, "expected an integer key, got '" + key + "'");
	return v;
}

template <class V, class F>
json int_map_json(const std::map<std::int64_t, V>& m, F conv)
{
	json out = json::object();
	for (const auto& [k, v] : m)
		out[std::to_string(k)] = conv(v);
	return out;
}

template <class V, class F>
std::map<std::int64_t, V> int_map_from(const json& j, F conv)
{
	std::map<std::int64_t, V> out;
	if (j.is_null())
		return out;
	if (!j.is_object())
		fail(ErrorKind::invalid_argument, "expected an object keyed by generation");
	for (const auto& [k, v] : j.items())
		out[int_key(k)] = conv(v);
	return out;
}

json level_arity_json(const LevelArity& a)
{
	return {{"below", count_json(a.below)},
			{"above", count_json(a.above)},
			{"split", a.split},
			{"overrides", int_map_json(a.overrides, count_json)}};
}

LevelArity level_arity_from(const json& j)
{
	LevelArity a;
	a.below = count_from_json(j.value("below", json(1)));
	a.above = count_from_json(j.value("above", json(1)));
	a.split = j.value("split", std::int64_t{0});
	a.overrides = int_map_from<ChildCount>(j.value("overrides", json()), count_from_json);
	return a;
}

json sequence_json(const SequenceRule& s)
{
	return {{"kind", to_string(s.kind)}, {"scale", to_json(s.scale)}, {"rate", s.rate}};
}

SequenceRule sequence_from(const json& j)
{
	std::string kind = j.at("kind").get<std::string>();
	cx scale = cx_from_json(j.value("scale", json(1)));
	double rate = j.value("rate", 1.0);
	if (kind == "constant")
		return SequenceRule::constant(scale);
	if (kind == "geometric")
		return SequenceRule::geometric(scale, rate);
	if (kind == "power")
		return SequenceRule::power(scale, rate);
	fail(ErrorKind::invalid_argument, "unknown sequence kind '" + kind + "'");
}

json level_weights_json(const LevelWeights& l)
{
	return {{"below", to_json(l.below)},
			{"above", to_json(l.above)},
			{"split", l.split},
			{"overrides", int_map_json(l.overrides, [](cx z) { return to_json(z); })}};
}

LevelWeights level_weights_from(const json& j)
{
	LevelWeights l;
	l.below = cx_from_json(j.value("below", json(1)));
	l.above = cx_from_json(j.value("above", json(1)));
	l.split = j.value("split", std::int64_t{0});
	l.overrides = int_map_from<cx>(j.value("overrides", json()), cx_from_json);
	return l;
}

json addresses(const std::vector<VertexAddr>& vs)
{
	json out = json::array();
	for (const auto& v : vs)
		out.push_back(format_address(v));
	return out;
}

json multi_json(const Multi& m)
{
	return json(m);
}

} // namespace

json load_json(const std::filesystem::path& path)
{
	std::ifstream in(path);
	if (!in)
		fail(ErrorKind::invalid_argument, "cannot read " + path.string());
	try {
		return json::parse(in);
	} catch (const json::exception& e) {
		fail(ErrorKind::invalid_argument, path.string() + ": " + e.what());
	}
}

json to_json(cx z)
{
	return json::array({number(z.real()), number(z.imag())});
}

cx cx_from_json(const json& j)
{
	if (j.is_number())
		return j.get<double>();
	if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
		return {j[0].get<double>(), j[1].get<double>()};
	fail(ErrorKind::invalid_argument, "complex numbers are written as [re, im]");
}

json number(double x)
{
	if (std::isnan(x))
		return "nan";
	if (std::isinf(x))
		return x > 0 ? "inf" : "-inf";
	return x;
}

json to_json(const TreeSpec& spec)
{
	json j{{"kind", to_string(spec.kind())}, {"shape", to_string(spec.shape())}};
	switch (spec.shape()) {
	case TreeShape::n_adic:
		j["n"] = spec.adic();
		break;
	case TreeShape::menthe:
	case TreeShape::staircase:
		break;
	case TreeShape::levels:
		j["arity"] = level_arity_json(spec.level_arity());
		break;
	case TreeShape::table: {
		json t = json::object();
		for (const auto& [v, c] : spec.arity_table())
			t[format_address(v)] = count_json(c);
		j["arity"] = t;
		j["fallback"] = count_json(spec.table_fallback());
		if (!spec.rooted()) {
			j["spine_arity"] = int_map_json(spec.spine_arity_table(), count_json);
			j["spine_fallback"] = count_json(spec.spine_fallback());
		}
		break;
	}
	}
	if (!spec.rooted())
		j["spine_index"] = int_map_json(spec.spine_index_table(), [](std::int64_t i) { return i; });
	return j;
}

TreeSpec tree_from_json(const json& j)
{
	try {
		std::string shape = j.at("shape").get<std::string>();
		std::string kind_text = j.value("kind", std::string("rooted"));
		if (kind_text != "rooted" && kind_text != "unrooted")
			fail(ErrorKind::invalid_argument, "tree kind must be rooted or unrooted");
		TreeKind kind = kind_text == "rooted" ? TreeKind::rooted : TreeKind::unrooted;
		auto spine_index = int_map_from<std::int64_t>(j.value("spine_index", json()),
													  [](const json& v) { return v.get<std::int64_t>(); });
		auto rooted_only = [&](const char* what) {
			if (kind != TreeKind::rooted)
				fail(ErrorKind::invalid_argument, std::string(what) + " trees are rooted");
		};
		if (shape == "n-adic") {
			rooted_only("n-adic");
			return TreeSpec::n_adic(j.at("n").get<std::int64_t>());
		}
		if (shape == "menthe") {
			rooted_only("menthe");
			return TreeSpec::menthe();
		}
		if (shape == "staircase") {
			rooted_only("staircase");
			return TreeSpec::staircase();
		}
		if (shape == "free-left-end")
			return TreeSpec::free_left_end(j.at("n").get<std::int64_t>());
		if (shape == "levels")
			return TreeSpec::levels(kind, level_arity_from(j.at("arity")), spine_index);
		if (shape == "table") {
			std::map<VertexAddr, ChildCount> table;
			json arity = j.value("arity", json::object());
			for (const auto& [k, v] : arity.items())
				table[parse_address(k)] = count_from_json(v);
			return TreeSpec::table(kind, table, count_from_json(j.value("fallback", json(1))),
								   int_map_from<ChildCount>(j.value("spine_arity", json()), count_from_json),
								   count_from_json(j.value("spine_fallback", json(1))), spine_index);
		}
		fail(ErrorKind::invalid_argument, "unknown tree shape '" + shape + "'");
	} catch (const json::exception& e) {
		fail(ErrorKind::invalid_argument, std::string("tree document: ") + e.what());
	}
}

json to_json(const WeightFamily& w)
{
	json j{{"family", to_string(w.tag())}};
	switch (w.tag()) {
	case WeightTag::rolewicz:
		j["lambda"] = to_json(w.as<RolewiczParams>().lambda);
		break;
	case WeightTag::dyadic_counterexample: {
		const auto& d = w.as<DyadicParams>();
		j["p"] = d.p;
		j["m0"] = d.m0;
		j["alpha"] = d.alpha;
		break;
	}
	case WeightTag::menthe: {
		const auto& m = w.as<MentheParams>();
		j["alpha"] = sequence_json(m.alpha);
		j["beta"] = sequence_json(m.beta);
		break;
	}
	case WeightTag::fertile_no_algebra:
		j["p"] = w.as<FertileParams>().p;
		break;
	case WeightTag::bilateral_rolewicz: {
		const auto& b = w.as<BilateralParams>();
		j["lambda"] = to_json(b.lambda);
		j["lo"] = b.lo;
		j["hi"] = b.hi;
		j["middle"] = int_map_json(b.middle, [](cx z) { return to_json(z); });
		break;
	}
	case WeightTag::symmetric:
		j["levels"] = level_weights_json(w.as<SymmetricParams>().levels);
		break;
	case WeightTag::table: {
		const auto& t = w.as<TableParams>();
		json e = json::object();
		for (const auto& [v, z] : t.entries)
			e[format_address(v)] = to_json(z);
		j["entries"] = e;
		j["fallback"] = to_json(t.fallback);
		break;
	}
	}
	return j;
}

WeightFamily weights_from_json(const json& j, const TreeSpec& spec)
{
	try {
		WeightTag tag = parse_weight_tag(j.at("family").get<std::string>());
		auto build = [&]() -> WeightFamily {
			switch (tag) {
			case WeightTag::rolewicz:
				return make_rolewicz(cx_from_json(j.at("lambda")));
			case WeightTag::dyadic_counterexample: {
				std::optional<std::int64_t> m0;
				std::optional<double> alpha;
				if (j.contains("m0"))
					m0 = j["m0"].get<std::int64_t>();
				if (j.contains("alpha"))
					alpha = j["alpha"].get<double>();
				return make_dyadic_counterexample(j.at("p").get<double>(), m0, alpha);
			}
			case WeightTag::menthe:
				return make_menthe(sequence_from(j.at("alpha")), sequence_from(j.at("beta")));
			case WeightTag::fertile_no_algebra:
				return make_fertile_no_algebra(spec, j.at("p").get<double>());
			case WeightTag::bilateral_rolewicz:
				return make_bilateral_rolewicz(spec, cx_from_json(j.at("lambda")), j.at("lo").get<std::int64_t>(),
											   j.at("hi").get<std::int64_t>(),
											   int_map_from<cx>(j.at("middle"), cx_from_json));
			case WeightTag::symmetric:
				return make_symmetric(level_weights_from(j.at("levels")));
			case WeightTag::table: {
				std::map<VertexAddr, cx> entries;
				json table = j.value("entries", json::object());
				for (const auto& [k, v] : table.items())
					entries[spec.canonical(parse_address(k))] = cx_from_json(v);
				return make_table(entries, cx_from_json(j.value("fallback", json(1))));
			}
			}
			fail(ErrorKind::invalid_argument, "unknown weight family");
		};
		WeightFamily w = build();
		w.check_tree(spec);
		return w;
	} catch (const json::exception& e) {
		fail(ErrorKind::invalid_argument, std::string("weight document: ") + e.what());
	}
}

json to_json(const FinSuppVec& f)
{
	json out = json::array();
	for (const auto& [v, z] : f.entries())
		out.push_back({format_address(v), number(z.real()), number(z.imag())});
	return out;
}

FinSuppVec vector_from_json(const json& j)
{
	if (!j.is_array())
		fail(ErrorKind::invalid_argument, "vector literal must be a list of [address, re, im] triples");
	FinSuppVec f;
	for (const auto& e : j) {
		if (!e.is_array() || e.size() < 2 || e.size() > 3 || !e[0].is_string() || !e[1].is_number() ||
			(e.size() == 3 && !e[2].is_number()))
			fail(ErrorKind::invalid_argument, "vector entries are [address, re, im]");
		f.add(parse_address(e[0].get<std::string>()), {e[1].get<double>(), e.size() == 3 ? e[2].get<double>() : 0});
	}
	return f;
}

json to_json(const CriterionReport& r)
{
	json table = json::array();
	for (const auto& c : r.table)
		table.push_back({{"vertex", format_address(c.vertex)},
						 {"n", c.n},
						 {"value", number(c.value)},
						 {"exact", c.exact},
						 {"truncated", c.truncated}});
	json mins = json::array();
	for (double x : r.min_per_n)
		mins.push_back(number(x));
	json j{{"theorem", to_string(r.theorem)},
		   {"space", r.space.name()},
		   {"quantity", r.quantity}};
	if (!r.note.empty())
		j["note"] = r.note;
	j["probes"] = addresses(r.probes);
	j["probes_truncated"] = r.probes_truncated;
	j["horizon"] = r.horizon;
	j["threshold"] = number(r.threshold);
	json verdict{{"kind", to_string(r.verdict)}};
	switch (r.verdict) {
	case VerdictKind::exact_divergence:
		verdict["certificate"] = r.certificate;
		break;
	case VerdictKind::diverges_up_to_horizon:
		verdict["witness"] = r.witness;
		break;
	case VerdictKind::stalled_below:
		verdict["bound"] = number(r.bound);
		break;
	}
	j["verdict"] = verdict;
	j["min_per_n"] = mins;
	j["table"] = table;
	return j;
}

std::string to_csv(const CriterionReport& r)
{
	std::ostringstream out;
	out << std::setprecision(17) << "vertex,n,value\n";
	for (const auto& c : r.table)
		out << format_address(c.vertex) << ',' << c.n << ',' << c.value << '\n';
	return out.str();
}

json to_json(const WitnessReport& r)
{
	json j{{"mode", r.mode}, {"space", r.space.name()}, {"n", r.n}};
	if (r.m)
		j["m"] = r.m;
	if (r.exponents) {
		const auto& e = *r.exponents;
		json values = json::array();
		for (std::size_t i = 0; i < e.P.size(); ++i)
			values.push_back({{"alpha", multi_json(e.P[i])}, {"L", number(e.values[i])}});
		j["exponents"] = {{"s", e.s}, {"beta", multi_json(e.beta)}, {"values", values}, {"margin", number(e.margin)}};
	}
	j["hit_error"] = number(r.hit_error);
	j["identity_error"] = number(r.identity_error);
	j["residual_norm"] = number(r.residual_norm);
	json approach = json::array();
	for (double x : r.approach_norms)
		approach.push_back(number(x));
	j["approach_norms"] = approach;
	json collapse = json::array();
	for (const auto& [a, x] : r.collapse_norms)
		collapse.push_back({{"alpha", multi_json(a)}, {"norm", number(x)}});
	j["collapse_norms"] = collapse;
	if (r.mode == "unrooted-power") {
		j["f1"] = addresses(r.f1);
		j["f2"] = addresses(r.f2);
	}
	json bumps = json::array();
	for (const auto& b : r.bumps)
		bumps.push_back({{"base", format_address(b.base)}, {"target", format_address(b.target)},
						 {"weight", number(b.weight)}});
	j["bumps"] = bumps;
	json corr = json::array();
	for (const auto& c : r.corrections)
		corr.push_back({{"group", addresses(c.group)}, {"target", format_address(c.target)},
						{"coefficient", to_json(c.coefficient)}});
	j["corrections"] = corr;
	json canc = json::array();
	for (const auto& c : r.cancellations)
		canc.push_back({{"vertex", format_address(c.vertex)}, {"top", format_address(c.top)},
						{"coefficient", number(c.coefficient)}, {"magnitude", number(c.magnitude)}});
	j["cancellations"] = canc;
	json kl = json::array();
	for (double x : r.keylemma_values)
		kl.push_back(number(x));
	j["keylemma_values"] = kl;
	j["truncated"] = r.truncated;
	json h = json::array();
	for (const auto& v : r.h)
		h.push_back(to_json(v));
	j["h"] = h;
	return j;
}

std::string to_csv(const WitnessReport& r)
{
	std::ostringstream out;
	out << std::setprecision(17) << "j,vertex,re,im\n";
	for (std::size_t j = 0; j < r.h.size(); ++j)
		for (const auto& [v, z] : r.h[j].entries())
			out << j + 1 << ',' << format_address(v) << ',' << z.real() << ',' << z.imag() << '\n';
	return out.str();
}

json to_json(const FertilityVerdict& v)
{
	json j{{"kind", to_string(v.kind)}};
	if (v.kind == FertilityVerdict::Kind::fertile)
		j["vertex"] = format_address(v.vertex);
	if (!v.certificate.empty())
		j["certificate"] = v.certificate;
	j["horizon"] = v.horizon;
	if (v.kind == FertilityVerdict::Kind::inconclusive)
		j["min_count"] = number(v.min_count);
	j["examined"] = v.examined;
	return j;
}

} // namespace treeshift
