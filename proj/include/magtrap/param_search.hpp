#ifndef MAGTRAP_PARAM_SEARCH_HPP
#define MAGTRAP_PARAM_SEARCH_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "magtrap/spin_couplings.hpp"
#include "magtrap/trap_model.hpp"

namespace magtrap {

struct CandidateParams {
  TrapLayout layout;
  FieldConfig field;
};

//! Full trap -> modes -> couplings pipeline for one parameter point.
struct CandidateEvaluation {
  bool ok = false;
  std::string failure;
  EquilibriumSolution equilibrium;
  NormalModes modes;
  CouplingSet couplings;
};

CandidateEvaluation evaluate_candidate(const CandidateParams& params);

enum class ExecutionPolicy { Serial, Parallel };

//! Evenly spaced axis, `points` >= 1 values from lo to hi inclusive (SI units).
struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  int points = 1;
  std::vector<double> values() const;
};

struct SearchSpace {
  GridAxis outer;   // W_1 = W_3, rad/s (multi-trap only)
  GridAxis middle;  // W_2, rad/s (multi-trap only)
  double gradient_step = 50.0;  // T/m, coarse stage
  double gradient_max = 1500.0; // T/m
  int refine_points = 9;        // per trap axis in the fine stage
  int gradient_refine = 5;      // fine gradient step = coarse / this
  int stages = 2;
  double epsilon_ceiling = 0.05;
  FieldConfig field;            // offset and bare eta; gradient is searched
  PhysicalConstants constants{};
  ExecutionPolicy policy = ExecutionPolicy::Parallel;
  bool keep_trace = false;

  static SearchSpace multi_trap_default();
  static SearchSpace linear_default();
  void validate() const;
};

struct SearchPoint {
  double outer = 0.0;     // rad/s
  double middle = 0.0;    // rad/s
  double gradient = 0.0;  // T/m
  bool feasible = false;
  double J = 0.0;
  double J13 = 0.0;
  double epsilon_max = 0.0;
  double displacement = 0.0;
  double spacing = 0.0;
};

struct SearchResult {
  TrapMode mode = TrapMode::MultiTrap;
  double target = 0.0;  // d (multi-trap) or h (linear), m
  bool feasible = false;
  SearchPoint best;
  CandidateEvaluation detail;  // re-evaluation of the best point
  std::size_t evaluations = 0;
  std::vector<SearchPoint> trace;  // every evaluated point when keep_trace
};

//! Strict ordering for the objective: larger J, then smaller eps_max, then
//! smaller gradient. Infeasible points never beat feasible ones.
bool better_candidate(const SearchPoint& a, const SearchPoint& b);

/// Grid-evaluation kernels. The serial loop is the reference; the OpenMP one
/// must return identical points in identical order.
std::vector<SearchPoint> evaluate_points_serial(const std::vector<CandidateParams>& points,
                                                double epsilon_ceiling);
std::vector<SearchPoint> evaluate_points_parallel(const std::vector<CandidateParams>& points,
                                                  double epsilon_ceiling);
std::vector<SearchPoint> evaluate_points(const std::vector<CandidateParams>& points,
                                         double epsilon_ceiling, ExecutionPolicy policy);

SearchResult maximize_J_multitrap(double d, const SearchSpace& space);
SearchResult maximize_J_linear(double h_target, const SearchSpace& space);

}  // namespace magtrap

#endif
