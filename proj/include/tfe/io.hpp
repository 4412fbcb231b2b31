#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tfe/profiles.hpp"
#include "tfe/semigroup.hpp"

namespace tfe {

using Json = nlohmann::ordered_json;

struct BranchSettings {
  int k = 1;
  std::string kind = "blowup";
  double eta = 1.0;
  int lattice = 0;  // c-samples; 0: 101 points (k=1) or 10 per side (k=2)
  int scan_points = 10000;
};

struct ContinueSettings {
  std::string kind = "global";
  int k = 0;
  double radius = 4.0;  // compact set for the homotopy distance
};

struct EvolveSettings {
  int k = 1;
  double sigma = 0.5;
  std::vector<double> taus{2, 3, 4, 5, 6};
};

struct RunConfig {
  int N = 1;
  double h = 0.05, R = 40.0;
  double quad_tol = 1e-6, tail_tol = 1e-6, resid_tol = 1e-4;
  int kmax = 5;
  std::vector<double> n_list{0.2, 0.1, 0.05};
  std::string out_dir = "out";
  bool deterministic = true;
  BranchSettings branch;
  ContinueSettings cont;
  EvolveSettings evolve;
  ProfileConfig profile;

  Grid grid() const { return Grid::make(N, h, R, false); }
  QuadConfig quad() const;
};

RunConfig default_config(int N = 1);
Json config_to_json(const RunConfig& c);
// starts from default_config(dimension) and overrides; unknown keys and bad values throw ConfigError
RunConfig config_from_json(const Json& j);
RunConfig load_config(const std::string& path);
void validate(const RunConfig& c);

std::string base64_encode(const std::vector<double>& v);
std::vector<double> base64_decode(const std::string& s);

Json table_to_json(const KernelTable& t);
KernelTable table_from_json(const Json& j);
Json polynomial_to_json(const SparsePolynomial& p);
SparsePolynomial polynomial_from_json(const Json& j);

// 17 significant digits
std::string fmt(double x);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  CsvWriter& operator<<(double x);
  CsvWriter& operator<<(int x);
  CsvWriter& operator<<(const std::string& s);
  void end_row();

 private:
  std::ofstream out_;
  bool first_ = true;
};

void write_json(const std::string& path, const Json& j);
Json read_json(const std::string& path);

}  // namespace tfe
