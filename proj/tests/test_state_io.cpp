#include "ipower/error.hpp"
#include "ipower/probes.hpp"
#include "ipower/sampling.hpp"
#include "ipower/state_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace ipower;

namespace {

ErrorKind parse_kind(const std::string& text) {
  try {
    io::parse_state(text);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "accepted: " << text;
  return ErrorKind::NonFinite;
}

}  // namespace

TEST(StateIo, RoundTripIsExact) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    sampling::Rng rng = sampling::split(777, seed);
    const qmat::Dims dims{2, 1 + static_cast<int>(seed % 3)};
    const qmat::DensityMatrix rho = sampling::random_mixed_state(dims, 1 + static_cast<int>(seed % 4), rng);
    const qmat::DensityMatrix back = io::parse_state(io::dump_state(rho));
    EXPECT_EQ(back.dims(), rho.dims());
    EXPECT_EQ(back.matrix(), rho.matrix()) << "seed " << seed;
  }
}

TEST(StateIo, SchemaShape) {
  const auto doc = io::state_to_json(probes::make_probe(probes::q_probe(0.5)));
  EXPECT_EQ(doc["dims"], nlohmann::json({2, 2}));
  EXPECT_EQ(doc["re"].size(), 4u);
  EXPECT_EQ(doc["im"][0].size(), 4u);
  EXPECT_DOUBLE_EQ(doc["re"][0][3].get<double>(), 0.25);
}

TEST(StateIo, RejectsMalformedDocuments) {
  EXPECT_EQ(parse_kind("not json"), ErrorKind::ParseError);
  EXPECT_EQ(parse_kind(R"({"re":[[1]],"im":[[0]]})"), ErrorKind::ParseError);
  EXPECT_EQ(parse_kind(R"({"dims":[2],"re":[[1,0],[0,0]],"im":[[0,0],[0,0]]})"), ErrorKind::ParseError);
  EXPECT_EQ(parse_kind(R"({"dims":[2,1],"re":[[1,0]],"im":[[0,0],[0,0]]})"), ErrorKind::ParseError);
  EXPECT_EQ(parse_kind(R"({"dims":[2,1],"re":[[1,"x"],[0,0]],"im":[[0,0],[0,0]]})"),
            ErrorKind::ParseError);
  EXPECT_EQ(parse_kind(R"({"dims":[2,1],"re":[[1,0],[0,0]],"im":[[0,0]]})"), ErrorKind::ParseError);
}

TEST(StateIo, MatrixValidationKeepsItsKind) {
  EXPECT_EQ(parse_kind(R"({"dims":[2,1],"re":[[1,0],[0,1]],"im":[[0,0],[0,0]]})"),
            ErrorKind::InvalidState);
  EXPECT_EQ(parse_kind(R"({"dims":[2,1],"re":[[0.5,0.3],[0,0.5]],"im":[[0,0],[0,0]]})"),
            ErrorKind::NonHermitian);
  // A matrix whose size disagrees with dims is a schema problem.
  EXPECT_EQ(parse_kind(R"({"dims":[2,2],"re":[[0.5,0],[0,0.5]],"im":[[0,0],[0,0]]})"),
            ErrorKind::ParseError);
}

TEST(StateIo, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "ipower_state_io_test.json";
  const qmat::DensityMatrix rho = probes::make_probe(probes::werner(0.5));
  io::write_state_file(rho, path);
  EXPECT_EQ(io::read_state_file(path).matrix(), rho.matrix());
  std::filesystem::remove(path);
  try {
    io::read_state_file(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
  }
}
