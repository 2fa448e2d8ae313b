#include "mcma/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "src/json_util.hpp"

namespace mcma::io {

namespace {

constexpr const char* kRobPrefix = "rob_";

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

// Alias tables: low/high -> 0/1, negative/none/positive -> 0/1/2.
double parse_rob_value(const std::string& raw, const std::string& field,
                       std::size_t line_no) {
  const std::string v = lower(trim(raw));
  if (v == "0" || v == "low") return 0.0;
  if (v == "1" || v == "high") return 1.0;
  std::ostringstream os;
  os << "invalid risk-of-bias value '" << raw << "' in field '" << field
     << "' (line " << line_no << ")";
  throw DomainError(os.str());
}

int parse_association(const std::string& raw, std::size_t line_no) {
  const std::string v = lower(trim(raw));
  if (v == "0" || v == "negative") return 0;
  if (v == "1" || v == "none") return 1;
  if (v == "2" || v == "positive") return 2;
  std::ostringstream os;
  os << "invalid association value '" << raw << "' in field 'association' (line "
     << line_no << ")";
  throw DomainError(os.str());
}

Dataset ingest_csv(const std::string& path,
                   const std::vector<std::string>& expected_domains) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 3 || header.front() != "study_id" ||
      header.back() != "association") {
    throw ParseError(path + ": header must be study_id,rob_<domain>...,association");
  }
  std::vector<std::string> domains;
  for (std::size_t c = 1; c + 1 < header.size(); ++c) {
    if (header[c].rfind(kRobPrefix, 0) != 0) {
      throw ParseError(path + ": missing column prefix 'rob_' at '" + header[c] + "'");
    }
    domains.push_back(header[c].substr(4));
  }
  if (!expected_domains.empty() && domains != expected_domains) {
    std::string want;
    for (const auto& d : expected_domains) want += d + " ";
    throw ParseError(path + ": domain columns do not match expected set: " + want);
  }

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      std::ostringstream os;
      os << path << ": line " << line_no << " has " << fields.size()
         << " fields, expected " << header.size();
      throw ParseError(os.str());
    }
    std::vector<double> row(domains.size());
    for (std::size_t c = 0; c < domains.size(); ++c) {
      row[c] = parse_rob_value(fields[c + 1], header[c + 1], line_no);
    }
    rows.push_back(std::move(row));
    labels.push_back(parse_association(fields.back(), line_no));
  }
  if (rows.empty()) throw ParseError(path + ": no data rows");

  Eigen::MatrixXd bias(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(domains.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < domains.size(); ++j) {
      bias(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return validate_dataset(bias, labels, domains, IngestedProvenance{path});
}

Dataset ingest_jsonl(const std::string& path,
                     const std::vector<std::string>& expected_domains) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);

  std::vector<std::string> domains = expected_domains;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      std::ostringstream os;
      os << path << ": line " << line_no << ": " << e.what();
      throw ParseError(os.str());
    }
    if (!j.contains("rob") || !j.at("rob").is_object()) {
      std::ostringstream os;
      os << path << ": line " << line_no << ": missing 'rob' object";
      throw ParseError(os.str());
    }
    if (!j.contains("association")) {
      std::ostringstream os;
      os << path << ": line " << line_no << ": missing 'association'";
      throw ParseError(os.str());
    }
    const auto& rob = j.at("rob");
    if (domains.empty()) {
      for (auto it = rob.begin(); it != rob.end(); ++it) domains.push_back(it.key());
    }
    std::vector<double> row(domains.size());
    for (std::size_t c = 0; c < domains.size(); ++c) {
      if (!rob.contains(domains[c])) {
        std::ostringstream os;
        os << path << ": line " << line_no << ": missing domain '" << domains[c] << "'";
        throw ParseError(os.str());
      }
      const auto& v = rob.at(domains[c]);
      row[c] = v.is_string()
                   ? parse_rob_value(v.get<std::string>(), domains[c], line_no)
                   : parse_rob_value(v.dump(), domains[c], line_no);
    }
    if (rob.size() != domains.size()) {
      std::ostringstream os;
      os << path << ": line " << line_no << ": unexpected extra domains";
      throw ParseError(os.str());
    }
    const auto& assoc = j.at("association");
    labels.push_back(assoc.is_string()
                         ? parse_association(assoc.get<std::string>(), line_no)
                         : parse_association(assoc.dump(), line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": no records");

  Eigen::MatrixXd bias(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(domains.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j2 = 0; j2 < domains.size(); ++j2) {
      bias(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j2)) = rows[i][j2];
    }
  }
  return validate_dataset(bias, labels, domains, IngestedProvenance{path});
}

std::string synth_study_id(Eigen::Index i, Eigen::Index n) {
  int width = 1;
  for (Eigen::Index v = n; v >= 10; v /= 10) ++width;
  std::ostringstream os;
  os << 's';
  os.width(width);
  os.fill('0');
  os << (i + 1);
  return os.str();
}

} // namespace

Format format_from_path(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const std::string ext = dot == std::string::npos ? "" : lower(path.substr(dot + 1));
  if (ext == "csv") return Format::Csv;
  if (ext == "jsonl") return Format::Jsonl;
  throw DomainError("cannot infer dataset format from path: " + path);
}

const std::vector<std::string>& cochrane_domains() {
  static const std::vector<std::string> domains = {
      "random_seq",       "alloc_conceal",        "blind_particip",
      "blind_outcome",    "incomplete_data",      "selective_reporting"};
  return domains;
}

Dataset ingest(const std::string& path, Format format,
               const std::vector<std::string>& expected_domains) {
  return format == Format::Csv ? ingest_csv(path, expected_domains)
                               : ingest_jsonl(path, expected_domains);
}

void write_dataset(const Dataset& dataset, const std::string& path, Format format) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  const Eigen::MatrixXd& bias = dataset.bias().values();
  const auto& names = dataset.bias().domain_names();

  if (format == Format::Csv) {
    out << "study_id";
    for (const auto& name : names) out << ',' << kRobPrefix << name;
    out << ",association\n";
    for (Eigen::Index i = 0; i < bias.rows(); ++i) {
      out << synth_study_id(i, bias.rows());
      for (Eigen::Index j = 0; j < bias.cols(); ++j) {
        out << ',' << static_cast<int>(bias(i, j));
      }
      out << ',' << dataset.labels()[static_cast<std::size_t>(i)] << '\n';
    }
  } else {
    for (Eigen::Index i = 0; i < bias.rows(); ++i) {
      nlohmann::ordered_json j;
      j["study_id"] = synth_study_id(i, bias.rows());
      nlohmann::ordered_json rob;
      for (Eigen::Index c = 0; c < bias.cols(); ++c) {
        rob[names[static_cast<std::size_t>(c)]] = static_cast<int>(bias(i, c));
      }
      j["rob"] = std::move(rob);
      j["association"] = dataset.labels()[static_cast<std::size_t>(i)];
      out << j.dump() << '\n';
    }
  }
}

nlohmann::json ground_truth_to_json(const synthgen::GroundTruth& truth,
                                    const SyntheticParams& params) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "synthetic";
  j["params"] = {{"n", params.n}, {"d", params.d}, {"w_u", params.w_u},
                 {"seed", params.seed}};
  j["summary"] = {truth.summary[0], truth.summary[1], truth.summary[2]};
  j["u"] = truth.u;
  return j;
}

nlohmann::json factor_model_to_json(const factor::FactorModel& model) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["k"] = model.latent_dim;
  j["loadings"] = jsonutil::mat_to_json(model.loadings);
  j["mean"] = jsonutil::vec_to_json(model.mean);
  j["noise_var"] = model.noise_var;
  j["converged"] = model.converged;
  return j;
}

factor::FactorModel factor_model_from_json(const nlohmann::json& j) {
  factor::FactorModel model;
  model.latent_dim = j.at("k").get<int>();
  model.loadings = jsonutil::json_to_mat(j.at("loadings"));
  model.mean = jsonutil::json_to_vec(j.at("mean"));
  model.noise_var = j.at("noise_var").get<double>();
  model.converged = j.value("converged", true);
  if (model.loadings.cols() != model.latent_dim || model.noise_var <= 0.0) {
    throw ParseError("invalid factor model document");
  }
  return model;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << content;
}

} // namespace mcma::io
