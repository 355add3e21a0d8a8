#include "treeshift/cli.hpp"

#include "treeshift/error.hpp"
#include "treeshift/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#ifndef TREESHIFT_GALLERY_DIR
#define TREESHIFT_GALLERY_DIR "gallery/expected"
#endif

namespace treeshift::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kIdentityTol = 1e-9;

fs::path out_dir()
{
	if (const char* env = std::getenv("TREESHIFT_OUT_DIR"); env && *env)
		return env;
	return ".";
}

/// Writes base.json and base.csv.
void write_report(const fs::path& base, const json& doc, const std::string& csv)
{
	if (base.has_parent_path())
		fs::create_directories(base.parent_path());
	fs::path j = base;
	j += ".json";
	fs::path c = base;
	c += ".csv";
	std::ofstream(j) << doc.dump(2) << '\n';
	std::ofstream(c) << csv;
}

fs::path report_base(const std::string& out, const std::string& fallback)
{
	return out.empty() ? out_dir() / fallback : fs::path(out);
}

/// Literal JSON if it starts like one, otherwise a file to read.
json literal_or_file(const std::string& text)
{
	auto first = text.find_first_not_of(" \t\n");
	if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
		try {
			return json::parse(text);
		} catch (const json::exception& e) {
			fail(ErrorKind::invalid_argument, std::string("bad literal: ") + e.what());
		}
	}
	return load_json(text);
}

struct Model
{
	TreeSpec tree;
	WeightFamily weights;
};

/// One file: a weight document whose "tree" field is a path (relative to it)
/// or an inline tree document. Two files: tree then weights.
Model load_model(const std::vector<std::string>& files)
{
	if (files.size() == 2) {
		auto tree = tree_from_json(load_json(files[0]));
		return {tree, weights_from_json(load_json(files[1]), tree)};
	}
	json w = load_json(files.at(0));
	if (!w.contains("tree"))
		fail(ErrorKind::invalid_argument, "weight document has no tree reference; pass the tree file first");
	json t = w["tree"].is_string() ? load_json(fs::path(files[0]).parent_path() / w["tree"].get<std::string>())
								   : w["tree"];
	auto tree = tree_from_json(t);
	return {tree, weights_from_json(w, tree)};
}

std::vector<Multi> parse_P(const std::string& text)
{
	json j = literal_or_file(text);
	if (!j.is_array() || j.empty())
		fail(ErrorKind::invalid_argument, "--P must be a nonempty list");
	std::vector<Multi> P;
	for (const auto& e : j) {
		if (e.is_number_integer())
			P.push_back({e.get<int>()});
		else if (e.is_array())
			P.push_back(e.get<Multi>());
		else
			fail(ErrorKind::invalid_argument, "--P entries are integers or integer lists");
	}
	return P;
}

std::vector<VertexAddr> parse_probes(const std::string& text)
{
	std::vector<VertexAddr> out;
	std::stringstream ss(text);
	std::string item;
	while (std::getline(ss, item, ','))
		if (!item.empty())
			out.push_back(parse_address(item));
	return out;
}

int verdict_exit(VerdictKind k)
{
	return k == VerdictKind::stalled_below ? stalled : ok;
}

std::string verdict_line(const CriterionReport& r)
{
	std::ostringstream s;
	s << to_string(r.theorem) << ' ' << r.space.name() << ": " << to_string(r.verdict);
	switch (r.verdict) {
	case VerdictKind::exact_divergence:
		s << " (" << r.certificate << ')';
		break;
	case VerdictKind::diverges_up_to_horizon:
		s << " along " << r.witness.size() << " iterates up to " << r.horizon;
		break;
	case VerdictKind::stalled_below:
		s << " (bound " << r.bound << ')';
		break;
	}
	return s.str();
}

struct WitnessRequest
{
	std::string mode = "rooted";
	SpaceTag space = SpaceTag::lp(2);
	std::vector<FinSuppVec> f;
	FinSuppVec g;
	std::vector<Multi> P{{1}, {2}};
	int m = 2;
	std::int64_t n = 10;
	double eps = 1e-3;
	WitnessOptions opt;
};

WitnessReport build(const Model& model, const WitnessRequest& req)
{
	if (req.mode == "rooted")
		return build_rooted(req.space, model.weights, model.tree, req.f, req.g, req.P, req.n, req.opt);
	if (req.mode == "unrooted-algebra")
		return build_unrooted_algebra(req.space, model.weights, model.tree, req.f, req.g, req.P, req.n, req.opt);
	if (req.mode == "unrooted-power") {
		if (req.f.size() > 1)
			fail(ErrorKind::invalid_argument, "unrooted-power takes a single --f");
		return build_unrooted_power(req.space, model.weights, model.tree, req.f.empty() ? FinSuppVec{} : req.f[0],
									req.g, req.m, req.n, req.opt);
	}
	fail(ErrorKind::invalid_argument, "unknown witness mode '" + req.mode + "'");
}

/// Exit rule: exact identity, and every approach/collapse/residual norm below eps.
bool witness_succeeds(const WitnessReport& r, const FinSuppVec& g, double eps)
{
	double tol = kIdentityTol * (1 + norm(g, r.space));
	bool identity = r.mode == "rooted" ? r.hit_error <= tol : r.identity_error <= tol;
	bool small = r.mode == "rooted" || r.residual_norm < eps;
	for (double x : r.approach_norms)
		small = small && x < eps;
	for (const auto& [_, x] : r.collapse_norms)
		small = small && x < eps;
	return identity && small;
}

json witness_summary(const WitnessReport& r, const FinSuppVec& g, double eps)
{
	json s{{"mode", r.mode}, {"space", r.space.name()}, {"n", r.n}};
	s["hit_error"] = number(r.hit_error);
	s["identity_error"] = number(r.identity_error);
	s["residual_norm"] = number(r.residual_norm);
	double approach = 0, collapse = 0;
	for (double x : r.approach_norms)
		approach = std::max(approach, x);
	for (const auto& [_, x] : r.collapse_norms)
		collapse = std::max(collapse, x);
	s["max_approach_norm"] = number(approach);
	s["max_collapse_norm"] = number(collapse);
	s["exit"] = witness_succeeds(r, g, eps) ? ok : negative;
	return s;
}

// Gallery --------------------------------------------------------------------

struct Gallery
{
	json report = json::object();
	json outcome = json::object();
	std::string csv = "section,vertex,n,value\n";

	void criterion(const std::string& key, Theorem t, const SpaceTag& space, const WeightFamily& w,
				   const TreeSpec& spec, const CriterionOptions& opt)
	{
		auto r = assemble_verdict(t, space, w, spec, default_probes(spec), opt);
		report[key] = to_json(r);
		json o{{"verdict", to_string(r.verdict)}, {"exit", verdict_exit(r.verdict)}};
		if (r.verdict == VerdictKind::exact_divergence)
			o["certificate"] = r.certificate;
		if (r.verdict == VerdictKind::diverges_up_to_horizon)
			o["witness"] = r.witness;
		if (r.verdict == VerdictKind::stalled_below)
			o["bound"] = number(r.bound);
		outcome[key] = o;
		std::ostringstream s;
		s << std::setprecision(17);
		for (const auto& c : r.table)
			s << key << ',' << format_address(c.vertex) << ',' << c.n << ',' << c.value << '\n';
		csv += s.str();
	}

	void norm_check(const std::string& key, const WeightFamily& w, const TreeSpec& spec, const SpaceTag& space)
	{
		auto r = operator_norm(w, spec, space);
		json j{{"space", space.name()}, {"value", number(r.value)}, {"exact", r.exact},
			   {"unbounded", r.unbounded}, {"method", r.method}};
		report[key] = j;
		outcome[key] = {{"value", number(r.value)}, {"unbounded", r.unbounded}};
	}

	void witness(const std::string& key, const Model& model, const WitnessRequest& req)
	{
		try {
			auto r = build(model, req);
			report[key] = to_json(r);
			outcome[key] = witness_summary(r, req.g, req.eps);
		} catch (const NeedsLargerN& e) {
			report[key] = {{"error", e.what()}};
			outcome[key] = {{"exit", needs_larger_n}, {"minimal_n", e.minimal_n()}};
		}
	}

	void fertility(const std::string& key, const TreeSpec& spec, std::int64_t horizon)
	{
		auto v = find_fertile(spec, horizon);
		report[key] = to_json(v);
		json o{{"kind", to_string(v.kind)}};
		if (v.kind == FertilityVerdict::Kind::fertile)
			o["vertex"] = format_address(v.vertex);
		outcome[key] = o;
	}
};

void gallery_rolewicz(Gallery& G)
{
	auto space = SpaceTag::lp(2);
	for (std::int64_t N : {2, 3}) {
		auto tree = TreeSpec::n_adic(N);
		double threshold = std::pow(static_cast<double>(N), -1.0 / space.conjugate());
		for (auto [tag, factor] : {std::pair{"above", 1.05}, std::pair{"below", 0.95}}) {
			std::string key = std::to_string(N) + "-adic-" + tag;
			auto w = make_rolewicz(threshold * factor);
			G.norm_check(key + "-norm", w, tree, space);
			G.criterion(key + "-hypercyclic", Theorem::rooted_hc_lp, space, w, tree, CriterionOptions{30, 1e3, 1 << 16});
		}
		for (auto [tag, lambda] : {std::pair{"above", 1.05}, std::pair{"below", 0.95}}) {
			std::string key = std::to_string(N) + "-adic-algebra-" + tag;
			G.criterion(key, Theorem::rooted_algebra_iv, space, make_rolewicz(lambda), tree,
						CriterionOptions{30, 1e3, 1 << 16});
		}
	}
	Model model{TreeSpec::n_adic(2), make_rolewicz(2)};
	WitnessRequest req;
	req.g = FinSuppVec::basis(VertexAddr::anchor());
	req.n = 20;
	G.witness("witness-rooted", model, req);
}

void gallery_dyadic(Gallery& G)
{
	auto tree = TreeSpec::n_adic(2);
	auto w = make_dyadic_counterexample(2);
	const auto& d = w.as<DyadicParams>();
	auto space = SpaceTag::lp(2);
	double q = space.conjugate();
	G.report["parameters"] = to_json(w);
	G.outcome["parameters"] = {{"m0", d.m0}, {"alpha", d.alpha}};
	G.norm_check("norm", w, tree, space);
	double bound = std::pow(1 + std::pow(0.5, d.alpha * q), 1 / q);
	G.report["norm_bound"] = bound;
	G.outcome["norm_within_bound"] = G.outcome["norm"]["value"].get<double>() <= bound * (1 + 1e-12);
	G.criterion("hypercyclic", Theorem::rooted_hc_lp, space, w, tree, CriterionOptions{12, 2, 1 << 16});
	G.criterion("algebra", Theorem::rooted_algebra_iv, space, w, tree, CriterionOptions{12, 1e3, 1 << 16});

	// Power sums with exponent m0/p stay bounded.
	double qm = static_cast<double>(d.m0) / d.p;
	double running = 0;
	json sums = json::array();
	for (std::int64_t N = 1; N <= 12; ++N) {
		double s = crit_sum(w, tree, VertexAddr::anchor(), N, qm).value;
		running = std::max(running, s);
		sums.push_back(number(s));
	}
	double limit = shifted_power_sum(0, 1e6, d.alpha * d.m0 / d.p) + 1e-3;
	G.report["power_sums"] = {{"exponent", qm}, {"values", sums}, {"running_sup", running}, {"limit", limit}};
	G.outcome["power_sums_bounded"] = running <= limit;
	G.fertility("fertility", tree, 6);
}

void gallery_menthe(Gallery& G)
{
	auto tree = TreeSpec::menthe();
	auto space = SpaceTag::lp(2);
	struct Case
	{
		const char* key;
		SequenceRule beta;
	};
	for (const auto& c : {Case{"growing", SequenceRule::geometric(1, 2)}, Case{"flat", SequenceRule::constant(1)}}) {
		auto w = make_menthe(SequenceRule::geometric(1, 0.5), c.beta);
		std::string k = c.key;
		G.norm_check(k + "-norm", w, tree, space);
		G.criterion(k + "-hypercyclic", Theorem::rooted_hc_lp, space, w, tree, CriterionOptions{20, 1e3, 1 << 14});
		G.criterion(k + "-algebra", Theorem::rooted_algebra_iv, space, w, tree, CriterionOptions{20, 1e3, 1 << 14});
	}
	Model model{tree, make_menthe(SequenceRule::geometric(1, 0.5), SequenceRule::geometric(1, 2))};
	WitnessRequest req;
	req.g = FinSuppVec::basis(VertexAddr::anchor(), 0.5);
	req.n = 16;
	req.opt.budget = 1 << 10;
	G.witness("witness-rooted", model, req);
}

void gallery_fertile(Gallery& G)
{
	auto tree = TreeSpec::n_adic(3);
	auto space = SpaceTag::lp(2);
	auto w = make_fertile_no_algebra(tree, space.p);
	G.fertility("fertility", tree, 6);
	G.norm_check("norm", w, tree, space);
	G.criterion("hypercyclic", Theorem::rooted_hc_lp, space, w, tree, CriterionOptions{20, 1e3, 1 << 16});
	G.criterion("algebra", Theorem::rooted_algebra_iv, space, w, tree, CriterionOptions{20, 1e3, 1 << 16});
	double sup = 0;
	for (std::int64_t n = 1; n <= 20; ++n)
		sup = std::max(sup, crit_sup(w, tree, VertexAddr::anchor(), n).value);
	G.report["sup_products"] = number(sup);
	G.outcome["sup_products_at_most_one"] = sup <= 1 + 1e-12;
}

void gallery_bilateral(Gallery& G)
{
	auto tree = TreeSpec::free_left_end(2);
	auto w = make_bilateral_rolewicz(tree, 2, 0, 0, {{0, 1}});
	G.norm_check("norm", w, tree, SpaceTag::lp(2));
	G.criterion("free-left-end", Theorem::free_left_end, SpaceTag::lp(2), w, tree, CriterionOptions{30, 1e3, 1 << 14});
	G.criterion("necessary-lp", Theorem::unrooted_v, SpaceTag::lp(2), w, tree, CriterionOptions{30, 1e3, 1 << 14});
	G.criterion("necessary-c0", Theorem::unrooted_c0, SpaceTag::c0(), w, tree, CriterionOptions{30, 1e3, 1 << 14});
	Model model{tree, w};
	FinSuppVec f;
	f.set(parse_address("@.1"), cx(0.5, 0.25));
	f.set(parse_address("@.2.1"), -0.75);
	FinSuppVec g = FinSuppVec::basis(parse_address("@.2"), cx(0.3, -0.4));
	for (int m : {2, 3}) {
		WitnessRequest req;
		req.mode = "unrooted-power";
		req.f = {f};
		req.g = g;
		req.m = m;
		req.n = 30;
		G.witness("witness-power-" + std::to_string(m), model, req);
	}
	WitnessRequest alg;
	alg.mode = "unrooted-algebra";
	alg.f = {f};
	alg.g = g;
	alg.P = {{1}, {3}};
	alg.n = 30;
	G.witness("witness-algebra", model, alg);
}

void gallery_staircase(Gallery& G)
{
	auto tree = TreeSpec::staircase();
	G.fertility("fertility", tree, 6);
	json counts = json::array();
	for (std::int64_t n = 1; n <= 10; ++n)
		counts.push_back(number(count_descendants(tree, VertexAddr::anchor(), n).value_or(-1)));
	G.report["root_descendant_counts"] = counts;
	G.outcome["root_descendant_counts"] = counts;
}

const std::vector<std::pair<std::string, std::function<void(Gallery&)>>>& gallery_table()
{
	static const std::vector<std::pair<std::string, std::function<void(Gallery&)>>> table{
		{"rolewicz-threshold", gallery_rolewicz},
		{"dyadic-counterexample", gallery_dyadic},
		{"menthe", gallery_menthe},
		{"fertile-no-algebra", gallery_fertile},
		{"bilateral-rolewicz", gallery_bilateral},
		{"no-fertile-staircase", gallery_staircase},
	};
	return table;
}

/// Structural equality with a relative tolerance on numbers.
void compare(const json& want, const json& got, const std::string& path, std::vector<std::string>& diffs)
{
	if (want.is_number() && got.is_number()) {
		double a = want.get<double>(), b = got.get<double>();
		if (std::abs(a - b) > 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}))
			diffs.push_back(path + ": expected " + want.dump() + ", got " + got.dump());
		return;
	}
	if (want.type() != got.type()) {
		diffs.push_back(path + ": expected " + want.dump() + ", got " + got.dump());
		return;
	}
	if (want.is_object()) {
		for (const auto& [k, v] : want.items())
			if (!got.contains(k))
				diffs.push_back(path + "/" + k + ": missing");
			else
				compare(v, got[k], path + "/" + k, diffs);
		for (const auto& [k, _] : got.items())
			if (!want.contains(k))
				diffs.push_back(path + "/" + k + ": unexpected");
		return;
	}
	if (want.is_array()) {
		if (want.size() != got.size()) {
			diffs.push_back(path + ": expected " + std::to_string(want.size()) + " items, got " +
							std::to_string(got.size()));
			return;
		}
		for (std::size_t i = 0; i < want.size(); ++i)
			compare(want[i], got[i], path + "/" + std::to_string(i), diffs);
		return;
	}
	if (want != got)
		diffs.push_back(path + ": expected " + want.dump() + ", got " + got.dump());
}

// Commands -------------------------------------------------------------------

int cmd_analyze(const std::vector<std::string>& files, const std::string& space_text, const std::string& theorem_text,
				const CriterionOptions& opt, const std::string& probes_text, const std::string& out_path,
				std::ostream& out, std::ostream& err)
{
	auto model = load_model(files);
	auto space = SpaceTag::parse(space_text);
	auto theorem = parse_theorem(theorem_text);
	if (theorem_is_rooted(theorem) != model.tree.rooted()) {
		err << "theorem " << theorem_text << " needs a " << (theorem_is_rooted(theorem) ? "rooted" : "unrooted")
			<< " tree\n";
		return usage;
	}
	bool truncated = false;
	auto probes = probes_text.empty() ? default_probes(model.tree, 64, &truncated) : parse_probes(probes_text);
	for (const auto& v : probes)
		model.tree.check(v);
	auto r = assemble_verdict(theorem, space, model.weights, model.tree, probes, opt);
	r.probes_truncated = r.probes_truncated || truncated;
	write_report(report_base(out_path, "analyze-" + theorem_text), to_json(r), to_csv(r));
	out << verdict_line(r) << '\n';
	return verdict_exit(r.verdict);
}

int cmd_witness(const std::vector<std::string>& files, WitnessRequest req, const std::string& out_path,
				std::ostream& out)
{
	auto model = load_model(files);
	for (const auto& f : req.f)
		for (const auto& [v, _] : f.entries())
			model.tree.check(v);
	auto r = build(model, req);
	bool success = witness_succeeds(r, req.g, req.eps);
	json doc = to_json(r);
	doc["eps"] = req.eps;
	doc["success"] = success;
	write_report(report_base(out_path, "witness-" + req.mode), doc, to_csv(r));
	out << r.mode << " n=" << r.n << ": hit_error " << r.hit_error << ", identity_error " << r.identity_error
		<< ", residual " << r.residual_norm << (success ? " (success)" : " (norms not below eps)") << '\n';
	return success ? ok : negative;
}

int cmd_fertile(const std::string& file, std::int64_t horizon, std::int64_t budget, const std::string& out_path,
				std::ostream& out)
{
	auto tree = tree_from_json(load_json(file));
	auto v = find_fertile(tree, horizon, budget);
	json doc = to_json(v);
	write_report(report_base(out_path, "fertile"), doc, "kind,vertex\n" + std::string(to_string(v.kind)) + ',' +
												  (v.kind == FertilityVerdict::Kind::fertile ? format_address(v.vertex)
																							 : std::string()) +
												  '\n');
	out << to_string(v.kind);
	if (v.kind == FertilityVerdict::Kind::fertile)
		out << '(' << format_address(v.vertex) << ')';
	out << '\n';
	switch (v.kind) {
	case FertilityVerdict::Kind::fertile: return ok;
	case FertilityVerdict::Kind::proven_none: return negative;
	case FertilityVerdict::Kind::inconclusive: return stalled;
	}
	return ok;
}

int cmd_gallery(const std::string& name, bool regenerate, const std::string& expected_dir, const std::string& out_path,
				std::ostream& out, std::ostream& err)
{
	const auto& table = gallery_table();
	auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == name; });
	if (it == table.end()) {
		err << "unknown gallery example '" << name << "'\n";
		return usage;
	}
	Gallery G;
	it->second(G);
	json doc{{"example", name}, {"outcome", G.outcome}, {"details", G.report}};
	write_report(report_base(out_path, "gallery-" + name), doc, G.csv);
	fs::path expected = fs::path(expected_dir) / (name + ".json");
	if (regenerate) {
		fs::create_directories(expected.parent_path());
		std::ofstream(expected) << G.outcome.dump(2) << '\n';
		out << name << ": expectations written to " << expected.string() << '\n';
		return ok;
	}
	if (!fs::exists(expected)) {
		err << "no stored expectations at " << expected.string() << " (run with --regenerate)\n";
		return negative;
	}
	std::vector<std::string> diffs;
	compare(load_json(expected), G.outcome, "", diffs);
	for (const auto& d : diffs)
		err << name << d << '\n';
	out << name << ": " << (diffs.empty() ? "all expectations met" : std::to_string(diffs.size()) + " mismatches")
		<< '\n';
	return diffs.empty() ? ok : negative;
}

} // namespace

const std::vector<std::string>& gallery_names()
{
	static const std::vector<std::string> names = [] {
		std::vector<std::string> v;
		for (const auto& [n, _] : gallery_table())
			v.push_back(n);
		return v;
	}();
	return names;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
	CLI::App app{"Weighted backward shifts on directed trees", "treeshift"};
	app.require_subcommand(1);

	std::vector<std::string> files;
	std::string space_text = "l2", theorem_text, probes_text, out_path;
	CriterionOptions copt;
	auto* analyze = app.add_subcommand("analyze", "Evaluate a theorem's criterion and report a verdict");
	analyze->add_option("files", files, "[tree file] weight file")->required()->expected(1, 2);
	analyze->add_option("--space", space_text, "l1, lp:<p>, l<p> or c0")->capture_default_str();
	analyze->add_option("--theorem", theorem_text, "criterion id")->required();
	analyze->add_option("--horizon", copt.horizon)->capture_default_str()->check(CLI::PositiveNumber);
	analyze->add_option("--threshold", copt.threshold)->capture_default_str()->check(CLI::PositiveNumber);
	analyze->add_option("--budget", copt.budget)->capture_default_str()->check(CLI::PositiveNumber);
	analyze->add_option("--probes", probes_text, "comma-separated vertex addresses");
	analyze->add_option("--out", out_path, "report path without extension");

	WitnessRequest req;
	std::vector<std::string> f_text;
	std::string g_text, P_text = "[1,2]", w_space = "l2";
	auto* witness = app.add_subcommand("witness", "Construct a witness vector for a chosen target");
	witness->add_option("files", files, "[tree file] weight file")->required()->expected(1, 2);
	witness->add_option("--space", w_space)->capture_default_str();
	witness->add_option("--mode", req.mode)
		->capture_default_str()
		->check(CLI::IsMember({"rooted", "unrooted-power", "unrooted-algebra"}));
	witness->add_option("--f", f_text, "vector literal or file, once per generator")->allow_extra_args(false);
	witness->add_option("--g", g_text, "target vector literal or file")->required();
	witness->add_option("--P", P_text, "exponent set, e.g. [1,2] or [[1,1],[2,1]]")->capture_default_str();
	witness->add_option("--m", req.m, "power for unrooted-power")->capture_default_str()->check(CLI::PositiveNumber);
	witness->add_option("--n", req.n, "iterate")->capture_default_str()->check(CLI::PositiveNumber);
	witness->add_option("--tau", req.opt.tau, "left-product threshold for the first class")->capture_default_str();
	witness->add_option("--eps", req.eps)->capture_default_str()->check(CLI::PositiveNumber);
	witness->add_option("--budget", req.opt.budget)->capture_default_str()->check(CLI::PositiveNumber);
	witness->add_option("--out", out_path, "report path without extension");

	std::string tree_file;
	std::int64_t horizon = 6, fbudget = 1 << 16;
	auto* fertile = app.add_subcommand("fertile", "Search for a fertile vertex");
	fertile->add_option("tree", tree_file)->required();
	fertile->add_option("--horizon", horizon)->capture_default_str()->check(CLI::PositiveNumber);
	fertile->add_option("--budget", fbudget)->capture_default_str()->check(CLI::PositiveNumber);
	fertile->add_option("--out", out_path, "report path without extension");

	std::string name, expected_dir = TREESHIFT_GALLERY_DIR;
	bool regenerate = false;
	auto* gallery = app.add_subcommand("gallery", "Reproduce a named example and check stored expectations");
	gallery->add_option("name", name, "example name")->required();
	gallery->add_flag("--regenerate", regenerate, "overwrite the stored expectations");
	gallery->add_option("--expected-dir", expected_dir)->capture_default_str();
	gallery->add_option("--out", out_path, "report path without extension");

	std::vector<std::string> reversed(args.rbegin(), args.rend());
	try {
		app.parse(reversed);
	} catch (const CLI::ParseError& e) {
		int code = app.exit(e, out, err);
		return code == 0 ? ok : usage;
	}

	try {
		if (*analyze)
			return cmd_analyze(files, space_text, theorem_text, copt, probes_text, out_path, out, err);
		if (*witness) {
			req.space = SpaceTag::parse(w_space);
			for (const auto& t : f_text)
				req.f.push_back(vector_from_json(literal_or_file(t)));
			req.g = vector_from_json(literal_or_file(g_text));
			req.P = parse_P(P_text);
			return cmd_witness(files, req, out_path, out);
		}
		if (*fertile)
			return cmd_fertile(tree_file, horizon, fbudget, out_path, out);
		if (*gallery)
			return cmd_gallery(name, regenerate, expected_dir, out_path, out, err);
	} catch (const NeedsLargerN& e) {
		err << e.what() << '\n';
		out << "needs n >= " << e.minimal_n() << '\n';
		return needs_larger_n;
	} catch (const Error& e) {
		err << e.what() << '\n';
		return usage;
	} catch (const fs::filesystem_error& e) {
		err << e.what() << '\n';
		return usage;
	}
	return usage;
}

} // namespace treeshift::cli
