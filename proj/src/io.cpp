#include "gdnn/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gdnn {

using nlohmann::json;

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from(const json& j) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("matrix json must be a non-empty array");
  if (!j[0].is_array()) {
    Eigen::MatrixXd m(1, j.size());
    for (std::size_t c = 0; c < j.size(); ++c) m(0, c) = j[c].get<double>();
    return m;
  }
  const std::size_t rows = j.size(), cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols)
      throw std::invalid_argument("ragged matrix json");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

std::string multi_index_key(const MultiIndex& a) {
  std::string s = "(";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(static_cast<int>(a[i]));
  }
  return s + ")";
}

MultiIndex multi_index_from_key(const std::string& key, int n) {
  MultiIndex a;
  a.reserve(n);
  std::string digits;
  for (char ch : key) {
    if (std::isdigit(ch)) {
      digits += ch;
    } else if (!digits.empty()) {
      a.push_back(static_cast<std::uint8_t>(std::stoi(digits)));
      digits.clear();
    }
  }
  if (static_cast<int>(a.size()) != n)
    throw std::invalid_argument("bad multi-index key: " + key);
  return a;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::string cone_spec_to_json(const ConeSpec& spec) {
  json blocks = json::array();
  for (const auto& b : spec.blocks()) {
    json jb;
    switch (b.kind) {
      case BlockKind::Nonneg:
        jb = {{"kind", "nonneg"}, {"dim", b.dim}};
        break;
      case BlockKind::SecondOrder:
        jb = {{"kind", "soc"}, {"dim", b.dim}};
        break;
      case BlockKind::PsdVec:
        jb = {{"kind", "psd"}, {"order", b.order}};
        break;
    }
    blocks.push_back(std::move(jb));
  }
  return json{{"blocks", blocks}}.dump(2);
}

ConeSpec cone_spec_from_json(const std::string& text) {
  json j = json::parse(text);
  std::vector<Block> blocks;
  for (const auto& jb : j.at("blocks")) {
    const std::string kind = jb.at("kind").get<std::string>();
    if (kind == "nonneg")
      blocks.push_back({BlockKind::Nonneg, jb.at("dim").get<int>()});
    else if (kind == "soc")
      blocks.push_back({BlockKind::SecondOrder, jb.at("dim").get<int>()});
    else if (kind == "psd")
      blocks.push_back({BlockKind::PsdVec, 0, jb.at("order").get<int>()});
    else
      throw std::invalid_argument("unknown block kind: " + kind);
  }
  return ConeSpec(blocks);
}

ConeSpec load_cone_spec(const std::string& path) {
  return cone_spec_from_json(read_file(path));
}

std::string matrix_to_json(const Eigen::MatrixXd& m) {
  return matrix_json(m).dump();
}

Eigen::MatrixXd matrix_from_json(const std::string& text) {
  return matrix_from(json::parse(text));
}

Eigen::MatrixXd load_matrix(const std::string& path) {
  const std::string text = read_file(path);
  if (ends_with(path, ".json")) return matrix_from_json(text);
  // whitespace-separated, one row per line
  std::vector<std::vector<double>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("empty matrix file: " + path);
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size())
      throw std::invalid_argument("ragged matrix file: " + path);
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

Eigen::VectorXd load_vector(const std::string& path) {
  Eigen::MatrixXd m = load_matrix(path);
  if (m.rows() == 1) return m.row(0).transpose();
  if (m.cols() == 1) return m.col(0);
  throw std::invalid_argument("file does not hold a vector: " + path);
}

std::string form_to_json(const Form& f) {
  json coeffs = json::object();
  for (int i = 0; i < f.basis->size(); ++i)
    if (f.coeffs[i] != 0.0) coeffs[multi_index_key((*f.basis)[i])] = f.coeffs[i];
  return json{{"n", f.n}, {"degree", f.degree}, {"coeffs", coeffs}}.dump(2);
}

Form form_from_json(const std::string& text) {
  json j = json::parse(text);
  Form f(j.at("n").get<int>(), j.at("degree").get<int>());
  for (auto& [key, value] : j.at("coeffs").items())
    f.coeffs[f.basis->index_of(multi_index_from_key(key, f.n))] =
        value.get<double>();
  return f;
}

std::string moment_vector_to_json(const MomentVector& y) {
  json coeffs = json::object();
  for (int i = 0; i < y.basis->size(); ++i)
    if (y.y[i] != 0.0) coeffs[multi_index_key((*y.basis)[i])] = y.y[i];
  return json{{"n", y.n}, {"degree", 4}, {"coeffs", coeffs}}.dump(2);
}

MomentVector moment_vector_from_json(const std::string& text) {
  json j = json::parse(text);
  MomentVector y(j.at("n").get<int>());
  for (auto& [key, value] : j.at("coeffs").items())
    y.y[y.basis->index_of(multi_index_from_key(key, y.n))] =
        value.get<double>();
  return y;
}

std::string instance_to_json(const MisocpInstance& inst) {
  json c = json::array();
  for (int i = 0; i < inst.n; ++i) c.push_back(inst.c[i]);
  return json{{"n", inst.n},
              {"c", c},
              {"binary", inst.binary},
              {"seed", inst.seed}}
      .dump(2);
}

MisocpInstance instance_from_json(const std::string& text) {
  json j = json::parse(text);
  MisocpInstance inst;
  inst.n = j.at("n").get<int>();
  const auto& c = j.at("c");
  inst.c.resize(inst.n);
  for (int i = 0; i < inst.n; ++i) inst.c[i] = c.at(i).get<double>();
  inst.binary = j.at("binary").get<std::vector<int>>();
  inst.seed = j.value("seed", std::uint64_t{0});
  inst.validate();
  return inst;
}

MisocpInstance load_instance(const std::string& path) {
  return instance_from_json(read_file(path));
}

std::string program_to_json(const BlockConicProgram& p) {
  json blocks = json::array();
  for (const auto& b : p.blocks()) {
    const char* kind = b.kind == VarKind::Psd      ? "psd"
                       : b.kind == VarKind::Soc    ? "soc"
                       : b.kind == VarKind::Nonneg ? "nonneg"
                                                   : "free";
    blocks.push_back({{"kind", kind}, {"size", b.size}});
  }
  auto linear_json = [&](const BlockLinear& f) {
    json entries = json::array();
    for (int b = 0; b < p.num_blocks(); ++b) {
      for (const auto& e : f.mat[b])
        entries.push_back({{"block", b}, {"row", e.row}, {"col", e.col},
                           {"value", e.value}});
      for (const auto& e : f.vec[b])
        entries.push_back({{"block", b}, {"index", e.index},
                           {"value", e.value}});
    }
    return entries;
  };
  json cons = json::array();
  for (int i = 0; i < p.num_constraints(); ++i)
    cons.push_back({{"rhs", p.rhs()[i]},
                    {"entries", linear_json(p.constraint(i))}});
  return json{{"blocks", blocks},
              {"objective", linear_json(p.objective())},
              {"constraints", cons}}
      .dump(2);
}

BlockConicProgram program_from_json(const std::string& text) {
  json j = json::parse(text);
  BlockConicProgram p;
  for (const auto& jb : j.at("blocks")) {
    const std::string kind = jb.at("kind").get<std::string>();
    const int size = jb.at("size").get<int>();
    if (kind == "psd")
      p.add_psd_block(size);
    else if (kind == "soc")
      p.add_soc_block(size);
    else if (kind == "nonneg")
      p.add_nonneg_block(size);
    else if (kind == "free")
      p.add_free_block(size);
    else
      throw std::invalid_argument("unknown variable kind: " + kind);
  }
  auto load_entries = [&](const json& entries, int con) {
    for (const auto& e : entries) {
      const int b = e.at("block").get<int>();
      const double v = e.at("value").get<double>();
      if (e.contains("row")) {
        if (con < 0)
          p.obj_mat(b, e.at("row").get<int>(), e.at("col").get<int>(), v);
        else
          p.con_mat(con, b, e.at("row").get<int>(), e.at("col").get<int>(), v);
      } else {
        if (con < 0)
          p.obj_vec(b, e.at("index").get<int>(), v);
        else
          p.con_vec(con, b, e.at("index").get<int>(), v);
      }
    }
  };
  load_entries(j.at("objective"), -1);
  for (const auto& jc : j.at("constraints")) {
    const int c = p.add_constraint(jc.at("rhs").get<double>());
    load_entries(jc.at("entries"), c);
  }
  return p;
}

BlockConicProgram load_program(const std::string& path) {
  return program_from_json(read_file(path));
}

std::string membership_to_json(const MembershipResult& r,
                               const std::string& variant) {
  json j{{"variant", variant},
         {"member", r.member},
         {"witness", r.witness},
         {"value", r.value},
         {"solver_failure", r.solver_failure}};
  if (r.gram) {
    j["certificate"] = {{"kind", "gram"},
                        {"min_eigenvalue", r.gram->min_eigenvalue},
                        {"match_residual", r.gram->match_residual},
                        {"gram", matrix_json(r.gram->gram)}};
  }
  if (r.moment) j["certificate"] = {{"kind", "moment"},
                                    {"moment",
                                     json::parse(moment_vector_to_json(*r.moment))}};
  if (r.decomposition) {
    json jm = json::array();
    for (int i = 0; i < r.decomposition->j_multipliers.size(); ++i)
      jm.push_back(r.decomposition->j_multipliers[i]);
    j["certificate"] = {{"kind", "decomposition"},
                        {"psd_part", matrix_json(r.decomposition->psd_part)},
                        {"j_multipliers", jm},
                        {"nonneg_part",
                         matrix_json(r.decomposition->nonneg_part)}};
  }
  if (r.cut) {
    j["cut"] = {{"source", to_string(r.cut->source)},
                {"violation", r.cut->violation},
                {"case_value", r.cut->case_value},
                {"matrix", matrix_json(r.cut->cut)}};
    json w = json::array();
    for (int i = 0; i < r.cut->witness.size(); ++i)
      w.push_back(r.cut->witness[i]);
    j["cut"]["witness_idempotent"] = w;
  }
  return j.dump(2);
}

std::string separation_to_json(const SeparationOutcome& out) {
  json j{{"inside", out.inside}};
  if (!out.inside) {
    j["source"] = to_string(out.source);
    j["violation"] = out.violation;
    j["case_value"] = out.case_value;
    j["cut"] = matrix_json(out.cut);
    json w = json::array();
    for (int i = 0; i < out.witness.size(); ++i) w.push_back(out.witness[i]);
    j["witness_idempotent"] = w;
  }
  return j.dump(2);
}

std::string solution_to_json(const Solution& sol) {
  return json{{"status", to_string(sol.status)},
              {"primal_objective", sol.primal_obj},
              {"dual_objective", sol.dual_obj},
              {"relative_gap", sol.gap},
              {"primal_residual", sol.primal_res},
              {"dual_residual", sol.dual_res},
              {"iterations", sol.iterations}}
      .dump(2);
}

std::string fig1_report_to_json(const Fig1Report& rep) {
  json values = json::array();
  json linear = json::array();
  for (const auto& r : rep.records) {
    values.push_back(r.trs_value);
    linear.push_back(r.linear_cases_min);
  }
  return json{{"experiment", "fig1"},
              {"seed", rep.seed},
              {"requested", rep.requested},
              {"attempts", rep.attempts},
              {"acceptance_rate",
               static_cast<double>(rep.requested) / rep.attempts},
              {"trs_values", values},
              {"linear_case_minima", linear},
              {"min_trs", rep.min_trs},
              {"median_trs", rep.median_trs},
              {"max_trs", rep.max_trs},
              {"negatives", rep.negatives},
              {"min_linear_cases", rep.min_linear_cases},
              {"version", rep.version}}
      .dump(2);
}

std::string table_report_to_json(const TableReport& rep) {
  json cells = json::array();
  for (const auto& c : rep.cells) {
    cells.push_back({{"n", c.n},
                     {"no", c.instance + 1},
                     {"variant", c.variant},
                     {"value", c.value},
                     {"time", c.seconds},
                     {"status", c.status},
                     {"skipped", c.skipped}});
  }
  return json{{"experiment", "tables"},
              {"seed", rep.seed},
              {"cells", cells},
              {"ordering_violations", rep.ordering_violations},
              {"bd_le_nn", {{"count", rep.bd_le_nn_count},
                            {"total", rep.bd_le_nn_total}}},
              {"zvp_tight", {{"count", rep.zvp_tight_count},
                             {"total", rep.zvp_tight_total}}},
              {"version", rep.version}}
      .dump(2);
}

std::string exchange_result_to_json(const ExchangeResult& r) {
  json trace = json::array();
  for (const auto& t : r.trace)
    trace.push_back({{"outer", t.outer},
                     {"inner", t.inner},
                     {"active_cuts", t.active_cuts},
                     {"objective", t.objective},
                     {"gamma", t.gamma},
                     {"cut_source", t.cut_source}});
  return json{{"value", r.value},
              {"status", to_string(r.status)},
              {"subproblem_solves", r.subproblem_solves},
              {"final_active_cuts", r.final_active_cuts},
              {"trace", trace}}
      .dump(2);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << content;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace gdnn
