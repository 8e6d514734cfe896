#include "magtrap/param_search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace magtrap {

CandidateEvaluation evaluate_candidate(const CandidateParams& params) {
  CandidateEvaluation ev;
  try {
    const auto& c = params.layout.constants;
    ev.equilibrium = solve_equilibrium(params.layout);
    ev.modes = normal_modes(params.layout, ev.equilibrium);
    ev.couplings = compute_couplings(ev.modes, params.field, ev.equilibrium, c);
    ev.ok = true;
  } catch (const ConvergenceError& e) {
    ev.failure = e.what();
  } catch (const UnstableConfiguration& e) {
    ev.failure = e.what();
  } catch (const std::domain_error& e) {
    ev.failure = e.what();
  }
  return ev;
}

std::vector<double> GridAxis::values() const {
  if (points < 1) throw std::invalid_argument("grid axis needs at least one point");
  std::vector<double> v(points);
  if (points == 1) {
    v[0] = lo;
    return v;
  }
  for (int i = 0; i < points; ++i) v[i] = lo + (hi - lo) * i / (points - 1);
  return v;
}

SearchSpace SearchSpace::multi_trap_default() {
  SearchSpace s;
  s.outer = {two_pi * 0.2e6, two_pi * 4.0e6, 39};
  s.middle = {two_pi * 0.05e6, two_pi * 4.0e6, 40};
  return s;
}

SearchSpace SearchSpace::linear_default() {
  SearchSpace s;
  s.outer = {0, 0, 1};
  s.middle = {0, 0, 1};
  return s;
}

void SearchSpace::validate() const {
  field.validate();
  constants.validate();
  if (!(gradient_step > 0 && gradient_max >= gradient_step) || !std::isfinite(gradient_max))
    throw std::invalid_argument("gradient grid must be positive and finite");
  if (!(epsilon_ceiling >= 0 && epsilon_ceiling < 1))
    throw std::invalid_argument("epsilon ceiling must lie in [0, 1)");
  if (stages < 1 || refine_points < 1 || gradient_refine < 1)
    throw std::invalid_argument("refinement settings must be positive");
}

bool better_candidate(const SearchPoint& a, const SearchPoint& b) {
  if (a.feasible != b.feasible) return a.feasible;
  if (!a.feasible) return false;
  if (a.J != b.J) return a.J > b.J;
  if (a.epsilon_max != b.epsilon_max) return a.epsilon_max < b.epsilon_max;
  return a.gradient < b.gradient;
}

namespace {

std::vector<double> gradient_grid(double lo, double hi, double step) {
  std::vector<double> g;
  const long n = std::lround(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) g.push_back(lo + step * i);
  return g;
}

void check_axis(const GridAxis& a, const char* name) {
  if (!(a.lo > 0 && a.hi >= a.lo) || !std::isfinite(a.hi))
    throw std::invalid_argument(std::string(name) + " range must be positive and finite");
}

// Runs one stage, folds the results into `result`. Selection is a serial scan
// in grid order so the outcome does not depend on the kernel.
void run_stage(const std::vector<CandidateParams>& points, const SearchSpace& space,
               SearchResult& result) {
  const auto evaluated = evaluate_points(points, space.epsilon_ceiling, space.policy);
  result.evaluations += evaluated.size();
  for (const auto& p : evaluated) {
    if (better_candidate(p, result.best)) result.best = p;
    if (space.keep_trace) result.trace.push_back(p);
  }
}

void finish(const SearchSpace& space, SearchResult& result) {
  result.feasible = result.best.feasible;
  if (!result.feasible) return;
  CandidateParams p;
  p.layout = result.mode == TrapMode::MultiTrap
                 ? TrapLayout::multi_trap(result.target, result.best.outer, result.best.middle,
                                          space.constants)
                 : TrapLayout::linear(result.best.outer, space.constants);
  p.field = space.field;
  p.field.gradient = result.best.gradient;
  result.detail = evaluate_candidate(p);
}

}  // namespace

SearchResult maximize_J_multitrap(double d, const SearchSpace& space) {
  if (!(d > 0)) throw std::invalid_argument("trap spacing d must be positive");
  space.validate();
  check_axis(space.outer, "W1");
  check_axis(space.middle, "W2");

  SearchResult result;
  result.mode = TrapMode::MultiTrap;
  result.target = d;

  GridAxis outer = space.outer, middle = space.middle;
  double g_lo = space.gradient_step, g_hi = space.gradient_max, g_step = space.gradient_step;

  for (int stage = 0; stage < space.stages; ++stage) {
    std::vector<CandidateParams> points;
    const auto wo = outer.values(), wm = middle.values();
    const auto gs = gradient_grid(g_lo, g_hi, g_step);
    points.reserve(wo.size() * wm.size() * gs.size());
    for (double w1 : wo)
      for (double w2 : wm)
        for (double g : gs) {
          CandidateParams p{TrapLayout::multi_trap(d, w1, w2, space.constants), space.field};
          p.field.gradient = g;
          points.push_back(p);
        }
    run_stage(points, space, result);
    if (!result.best.feasible) break;

    // Next stage: a box of one coarse cell around the incumbent.
    const double so = outer.points > 1 ? (outer.hi - outer.lo) / (outer.points - 1) : 0.0;
    const double sm = middle.points > 1 ? (middle.hi - middle.lo) / (middle.points - 1) : 0.0;
    const int n = space.refine_points | 1;
    outer = {std::max(result.best.outer - so, 0.5 * result.best.outer), result.best.outer + so,
             so > 0 ? n : 1};
    middle = {std::max(result.best.middle - sm, 0.5 * result.best.middle),
              result.best.middle + sm, sm > 0 ? n : 1};
    g_lo = std::max(result.best.gradient - g_step, g_step / space.gradient_refine);
    g_hi = std::min(result.best.gradient + g_step, space.gradient_max);
    g_step /= space.gradient_refine;
  }
  finish(space, result);
  return result;
}

SearchResult maximize_J_linear(double h_target, const SearchSpace& space) {
  space.validate();
  const double w = TrapLayout::linear_frequency_for_spacing(h_target, space.constants);

  SearchResult result;
  result.mode = TrapMode::Linear;
  result.target = h_target;

  double g_lo = space.gradient_step, g_hi = space.gradient_max, g_step = space.gradient_step;
  for (int stage = 0; stage < space.stages; ++stage) {
    std::vector<CandidateParams> points;
    for (double g : gradient_grid(g_lo, g_hi, g_step)) {
      CandidateParams p{TrapLayout::linear(w, space.constants), space.field};
      p.field.gradient = g;
      points.push_back(p);
    }
    run_stage(points, space, result);
    if (!result.best.feasible) break;
    g_lo = std::max(result.best.gradient - g_step, g_step / space.gradient_refine);
    g_hi = std::min(result.best.gradient + g_step, space.gradient_max);
    g_step /= space.gradient_refine;
  }
  finish(space, result);
  return result;
}

}  // namespace magtrap
