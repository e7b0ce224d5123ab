#include "rumtest/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "rumtest/errors.hpp"

namespace rumtest::io {
namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

double parse_double(const std::string& s, int row, int col) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("row " + std::to_string(row) + ", column " +
                    std::to_string(col) + ": not a number: '" + s + "'");
  }
}

long parse_long(const std::string& s, int row, int col) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("row " + std::to_string(row) + ", column " +
                    std::to_string(col) + ": not an integer: '" + s + "'");
  }
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open " + path);
  return f;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path);
  return f;
}

int resolve_period(const std::string& token, const BudgetSystem& b, int row) {
  for (int j = 0; j < b.count(); ++j) {
    if (b.budgets[j].label == token) return j;
  }
  try {
    std::size_t used = 0;
    const int j = std::stoi(token, &used) - 1;
    if (used == token.size() && j >= 0 && j < b.count()) return j;
  } catch (const std::exception&) {
  }
  throw DataError("row " + std::to_string(row) + ": unknown period '" + token +
                  "'");
}

}  // namespace

BudgetSystem load_prices_csv(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line)) throw DataError(path + " is empty");
  auto header = split(line);
  if (header.size() < 2 || header[0] != "period") {
    throw DataError("expected header period,p1,...,pK");
  }
  const int K = static_cast<int>(header.size()) - 1;
  std::vector<std::string> labels;
  std::vector<Eigen::VectorXd> rows;
  int rowno = 1;
  while (std::getline(f, line)) {
    ++rowno;
    if (line.empty()) continue;
    auto fields = split(line);
    if (static_cast<int>(fields.size()) != K + 1) {
      throw DataError("row " + std::to_string(rowno) + ": expected " +
                      std::to_string(K + 1) + " fields, got " +
                      std::to_string(fields.size()));
    }
    labels.push_back(fields[0]);
    Eigen::VectorXd p(K);
    for (int k = 0; k < K; ++k) p(k) = parse_double(fields[k + 1], rowno, k + 2);
    rows.push_back(p);
  }
  if (rows.empty()) throw DataError(path + " has no data rows");
  Eigen::MatrixXd prices(static_cast<int>(rows.size()), K);
  for (std::size_t j = 0; j < rows.size(); ++j) prices.row(j) = rows[j];
  return make_budget_system(prices, labels);
}

void write_prices_csv(const std::string& path, const BudgetSystem& b) {
  auto f = open_out(path);
  f << "period";
  for (int k = 1; k <= b.num_goods; ++k) f << ",p" << k;
  f << "\n";
  f.precision(17);
  for (const auto& budget : b.budgets) {
    f << budget.label;
    for (int k = 0; k < b.num_goods; ++k) f << "," << budget.price(k);
    f << "\n";
  }
}

void write_patches_csv(const std::string& path, const BudgetSystem& b,
                       const PatchTable& t) {
  auto f = open_out(path);
  f << "budget,within_index,sign_vector,representative\n";
  f.precision(17);
  for (const auto& p : t.patches) {
    f << b.budgets[p.budget].label << "," << p.within_index << ",";
    for (int k = 0; k < p.sign.size(); ++k) f << (k ? ";" : "") << p.sign(k);
    f << ",";
    for (int k = 0; k < p.representative.size(); ++k) {
      f << (k ? ";" : "") << p.representative(k);
    }
    f << "\n";
  }
}

Microdata load_microdata_csv(const std::string& path, const BudgetSystem& b,
                             const PatchTable& t, double tie_tol) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line)) throw DataError(path + " is empty");
  auto header = split(line);
  bool bundle_form;
  int base_cols;
  if (header.size() >= 2 && header[0] == "period" && header[1] == "patch") {
    bundle_form = false;
    base_cols = 2;
  } else if (header.size() >= 2 && header[0] == "period" &&
             !header[1].empty() && header[1][0] == 'q') {
    bundle_form = true;
    base_cols = 1 + b.num_goods;
  } else {
    throw DataError("expected header period,patch,w[,z] or period,q1..qK,w[,z]");
  }
  const int ncols = static_cast<int>(header.size());
  if (ncols != base_cols + 1 && ncols != base_cols + 2) {
    throw DataError("unexpected column count in header");
  }
  const bool has_z = ncols == base_cols + 2;

  Microdata data;
  data.patch.resize(b.count());
  data.w.resize(b.count());
  data.z.resize(b.count());
  int rowno = 1;
  while (std::getline(f, line)) {
    ++rowno;
    if (line.empty()) continue;
    auto fields = split(line);
    if (static_cast<int>(fields.size()) != ncols) {
      throw DataError("row " + std::to_string(rowno) + ": expected " +
                      std::to_string(ncols) + " fields, got " +
                      std::to_string(fields.size()));
    }
    const int j = resolve_period(fields[0], b, rowno);
    int patch_idx;
    if (bundle_form) {
      Eigen::VectorXd y(b.num_goods);
      for (int k = 0; k < b.num_goods; ++k) {
        y(k) = parse_double(fields[1 + k], rowno, k + 2);
      }
      const double scale = b.price(j).dot(y);
      if (!(scale > 0.0)) {
        throw DataError("row " + std::to_string(rowno) +
                        ": bundle with nonpositive expenditure");
      }
      patch_idx = classify_bundle(y / scale, j, b, t, tie_tol);
    } else {
      patch_idx = static_cast<int>(parse_long(fields[1], rowno, 2));
      const int off = t.block_offset(j);
      if (patch_idx < off || patch_idx >= off + t.per_budget_counts[j]) {
        throw DataError("row " + std::to_string(rowno) +
                        ": patch index outside the period's block");
      }
    }
    data.patch[j].push_back(patch_idx);
    data.w[j].push_back(parse_double(fields[base_cols], rowno, base_cols + 1));
    if (has_z) {
      data.z[j].push_back(
          parse_double(fields[base_cols + 1], rowno, base_cols + 2));
    }
  }
  data.validate(t);
  return data;
}

void write_microdata_csv(const std::string& path, const Microdata& data) {
  auto f = open_out(path);
  const bool has_z = data.has_instrument();
  f << "period,patch,w" << (has_z ? ",z" : "") << "\n";
  f.precision(17);
  for (int j = 0; j < data.periods(); ++j) {
    for (long n = 0; n < data.n(j); ++n) {
      f << (j + 1) << "," << data.patch[j][n] << "," << data.w[j][n];
      if (has_z) f << "," << data.z[j][n];
      f << "\n";
    }
  }
}

void write_a_matrix(const std::string& path, const RationalMatrix& a) {
  auto f = open_out(path);
  f << a.rows() << " " << a.cols() << "\n";
  for (int j = 0; j < a.num_blocks(); ++j) {
    f << (j ? " " : "") << a.per_block_counts[j];
  }
  f << "\n";
  for (const auto& col : a.columns) {
    for (std::size_t j = 0; j < col.size(); ++j) f << (j ? " " : "") << col[j];
    f << "\n";
  }
}

RationalMatrix read_a_matrix(const std::string& path) {
  auto f = open_in(path);
  long I = 0, H = 0;
  if (!(f >> I >> H) || I < 1 || H < 0) {
    throw DataError("bad header in " + path);
  }
  RationalMatrix a;
  // Per-block counts line; its length fixes the block count.
  std::string line;
  std::getline(f, line);  // rest of header line
  if (!std::getline(f, line)) throw DataError("missing block counts");
  {
    std::istringstream is(line);
    int c;
    while (is >> c) a.per_block_counts.push_back(c);
  }
  if (a.rows() != I) throw DataError("block counts do not sum to I");
  for (long h = 0; h < H; ++h) {
    std::vector<int> col(a.num_blocks());
    for (int j = 0; j < a.num_blocks(); ++j) {
      if (!(f >> col[j]) || col[j] < 0 || col[j] >= a.per_block_counts[j]) {
        throw DataError("bad pick tuple at column " + std::to_string(h));
      }
    }
    a.columns.push_back(std::move(col));
  }
  return a;
}

std::string test_report_json(const TestResult& r, const std::string& estimator,
                             bool include_boot_stats) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["estimator"] = estimator;
  j["J_N"] = r.jn;
  j["tau"] = r.tau;
  j["R"] = r.boot_stats.size() + r.failed_reps;
  j["alpha"] = r.alpha;
  j["critical_value"] = r.critical_value;
  j["p_value"] = r.p_value;
  j["reject"] = r.reject();
  j["eta_hat"] = std::vector<double>(r.eta_hat.data(),
                                     r.eta_hat.data() + r.eta_hat.size());
  j["diagnostics"] = {{"solver_iterations", r.solver_iterations},
                      {"max_kkt_violation", r.max_kkt},
                      {"failed_replications", r.failed_reps}};
  if (include_boot_stats) j["boot_stats"] = r.boot_stats;
  return j.dump(2);
}

std::string bounds_report_json(const std::string& quantity, int target_budget,
                               const BoundResult& r) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["quantity"] = quantity;
  j["target_budget"] = target_budget + 1;
  j["lower"] = r.lower;
  j["upper"] = r.upper;
  return j.dump(2);
}

}  // namespace rumtest::io
