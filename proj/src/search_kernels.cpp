#include "magtrap/param_search.hpp"

namespace magtrap {

namespace {

SearchPoint summarize(const CandidateParams& p, double ceiling) {
  SearchPoint s;
  s.outer = p.layout.trap_frequencies[0];
  s.middle = p.layout.trap_frequencies[1];
  s.gradient = p.field.gradient;
  const CandidateEvaluation ev = evaluate_candidate(p);
  if (!ev.ok) return s;
  s.J = ev.couplings.J;
  s.J13 = ev.couplings.J13;
  s.epsilon_max = ev.couplings.epsilon_max;
  s.displacement = ev.equilibrium.outer_displacement;
  s.spacing = ev.equilibrium.spacing;
  s.feasible = s.epsilon_max < ceiling;
  return s;
}

}  // namespace

std::vector<SearchPoint> evaluate_points_serial(const std::vector<CandidateParams>& points,
                                                double epsilon_ceiling) {
  std::vector<SearchPoint> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(summarize(p, epsilon_ceiling));
  return out;
}

std::vector<SearchPoint> evaluate_points_parallel(const std::vector<CandidateParams>& points,
                                                  double epsilon_ceiling) {
  std::vector<SearchPoint> out(points.size());
  const auto n = static_cast<long>(points.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (long i = 0; i < n; ++i) out[i] = summarize(points[i], epsilon_ceiling);
  return out;
}

std::vector<SearchPoint> evaluate_points(const std::vector<CandidateParams>& points,
                                         double epsilon_ceiling, ExecutionPolicy policy) {
  return policy == ExecutionPolicy::Parallel
             ? evaluate_points_parallel(points, epsilon_ceiling)
             : evaluate_points_serial(points, epsilon_ceiling);
}

}  // namespace magtrap
