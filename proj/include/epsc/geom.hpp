#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace epsc {

using Vec = Eigen::VectorXd;
// One point per column.
using Points = Eigen::MatrixXd;

// A violated hypothesis of a theorem or construction. The message names it.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Ball {
  Vec center;
  double radius = 0.0;
};

// Hyperplane through C orthogonal to omega, with C removed.
struct PuncturedPlane {
  Vec C;
  Vec omega;
};

struct SupportData {
  Vec omega;
  double h = 0.0;
  double width = 0.0;
  Points support_set;
  bool regular = false;
};

enum class Side { fromK, fromL };

// side == fromK: b in L realizes the maximum and a is its nearest point in K.
// side == fromL: a in K realizes the maximum and b is its nearest point in L.
struct WitnessPair {
  Vec a;
  Vec b;
  Side side = Side::fromK;
  double dist = 0.0;
};

double hausdorff(const Points& A, const Points& B);
// max over a in A of dist(a, B).
double directed_hausdorff(const Points& A, const Points& B);
SupportData support_data(const Points& K, const Vec& omega, double cluster_tol);
WitnessPair witness_pair(const Points& K, const Points& L);
bool outer_parallel_contains(const Points& K, double eps, const Vec& x);

double point_set_dist(const Points& K, const Vec& x);
double diameter(const Points& K);

bool lex_less(const Vec& a, const Vec& b);
Points from_rows(const std::vector<std::vector<double>>& rows);
Vec vec(std::initializer_list<double> xs);

// Orthonormal basis (columns) of the orthogonal complement of span(U).
Eigen::MatrixXd orth_complement(const Eigen::MatrixXd& U, int n);

// Deterministic unit directions on S^{n-1}; Fibonacci lattice for n = 3.
std::vector<Vec> sphere_directions(int n, int count);

void require_dim(const Vec& x, int n, const char* what);

}  // namespace epsc
