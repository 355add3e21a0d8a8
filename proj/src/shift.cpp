#include "treeshift/shift.hpp"

#include "treeshift/error.hpp"

namespace treeshift {

FinSuppVec apply(const WeightFamily& w, const TreeSpec& spec, const FinSuppVec& f, std::int64_t n)
{
	if (n < 0)
		fail(ErrorKind::invalid_argument, "iterate must be nonnegative");
	if (n == 0)
		return f;
	FinSuppVec out;
	for (auto& [u, z] : f.entries()) {
		auto top = spec.parent(u, n);
		if (!top)
			continue;
		out.add(*top, path_product_up(w, spec, u, n) * z);
	}
	return out;
}

FinSuppVec apply_by_definition(const WeightFamily& w, const TreeSpec& spec, const FinSuppVec& f, std::int64_t n,
							   const std::vector<VertexAddr>& at, std::int64_t budget)
{
	FinSuppVec out;
	for (auto& v : at) {
		cx sum = 0;
		walk_descendants(spec, v, n, budget, [&](const VertexAddr& u) {
			if (auto z = f.at(u); z != cx(0))
				sum += path_product(w, spec, v, u) * z;
			return true;
		});
		out.set(v, sum);
	}
	return out;
}

std::vector<std::pair<std::int64_t, double>> orbit_norms(const WeightFamily& w, const TreeSpec& spec,
														 const FinSuppVec& f, const FinSuppVec& g,
														 const SpaceTag& s, std::int64_t n_max)
{
	if (n_max < 0)
		fail(ErrorKind::invalid_argument, "n_max must be nonnegative");
	std::vector<std::pair<std::int64_t, double>> out;
	auto cur = f;
	for (std::int64_t n = 0; n <= n_max; ++n) {
		if (n > 0)
			cur = apply(w, spec, cur, 1);
		out.emplace_back(n, norm(cur - g, s));
	}
	return out;
}

} // namespace treeshift
