#include "ipower/state_io.hpp"

#include "ipower/error.hpp"

#include <fstream>
#include <sstream>

namespace ipower::io {

using qmat::ComplexMatrix;
using qmat::DensityMatrix;

nlohmann::json state_to_json(const DensityMatrix& rho) {
  const ComplexMatrix& m = rho.matrix();
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json re_row = nlohmann::json::array();
    nlohmann::json im_row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re_row.push_back(m(i, j).real());
      im_row.push_back(m(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return {{"dims", {rho.dims().a, rho.dims().b}}, {"re", std::move(re)}, {"im", std::move(im)}};
}

namespace {

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorKind::ParseError, what);
}

void read_part(const nlohmann::json& rows, int n, const char* name, ComplexMatrix& m, bool imag) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
    schema_error(std::string("'") + name + "' must be an array of " + std::to_string(n) + " rows");
  }
  for (int i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      schema_error(std::string("'") + name + "' row " + std::to_string(i) + " must have " +
                   std::to_string(n) + " entries");
    }
    for (int j = 0; j < n; ++j) {
      const auto& v = row[static_cast<std::size_t>(j)];
      if (!v.is_number()) schema_error(std::string("'") + name + "' entries must be numbers");
      const double x = v.get<double>();
      if (imag) {
        m(i, j).imag(x);
      } else {
        m(i, j).real(x);
      }
    }
  }
}

}  // namespace

DensityMatrix state_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) schema_error("state must be a JSON object");
  for (const char* key : {"dims", "re", "im"}) {
    if (!doc.contains(key)) schema_error(std::string("missing key '") + key + "'");
  }
  const auto& dims = doc.at("dims");
  if (!dims.is_array() || dims.size() != 2 || !dims[0].is_number_integer() ||
      !dims[1].is_number_integer()) {
    schema_error("'dims' must be [dA, dB] with integer entries");
  }
  const qmat::Dims d{dims[0].get<int>(), dims[1].get<int>()};
  if (d.a < 1 || d.b < 1 || d.total() > qmat::kMaxDimension) {
    schema_error("'dims' out of range");
  }
  ComplexMatrix m = ComplexMatrix::Zero(d.total(), d.total());
  read_part(doc.at("re"), d.total(), "re", m, false);
  read_part(doc.at("im"), d.total(), "im", m, true);
  return DensityMatrix(m, d);
}

std::string dump_state(const DensityMatrix& rho) {
  return state_to_json(rho).dump();
}

DensityMatrix parse_state(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  return state_from_json(doc);
}

DensityMatrix read_state_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_state(buffer.str());
}

void write_state_file(const DensityMatrix& rho, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ParseError, "cannot write " + path.string());
  out << state_to_json(rho).dump(2) << '\n';
}

}  // namespace ipower::io
