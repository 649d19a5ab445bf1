#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "dfsq/dataset_io.hpp"

using namespace dfsq;

TEST_CASE("doubles round-trip through text") {
  for (double v : {0.0, 0.1, -2.4, 1.0 / 3.0, 6.02214076e23, 5e-324, 33.35})
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(8.0) == "8");
}

TEST_CASE("parity dataset csv round-trip") {
  ParityDataset d;
  d.records = {{0.0, 0.9, parity_sigma(0.9, 100), 100},
               {0.005, -0.34, parity_sigma(-0.34, 100), 100},
               {0.3, 1.0, 0.0, 7}};
  const auto text = format_dataset_csv(d);
  CHECK(text.rfind("tau_s,parity,sigma,shots\n", 0) == 0);
  const auto back = parse_dataset_csv(text);
  REQUIRE(back.records.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.records[i].tau == d.records[i].tau);
    CHECK(back.records[i].parity == d.records[i].parity);
    CHECK(back.records[i].sigma == d.records[i].sigma);
    CHECK(back.records[i].shots == d.records[i].shots);
  }
  CHECK_FALSE(back.snapshot.has_value());
  CHECK(format_dataset_csv(back) == text);
}

TEST_CASE("parity csv validation") {
  CHECK_THROWS_AS(parse_dataset_csv(""), DatasetFormatError);
  CHECK_THROWS_AS(parse_dataset_csv("t,parity,sigma,shots\n0,0,0.1,10\n"), DatasetFormatError);
  CHECK_THROWS_AS(parse_dataset_csv("tau_s,parity,sigma,shots\n0,1.2,0.1,10\n"), DatasetFormatError);
  CHECK_THROWS_AS(parse_dataset_csv("tau_s,parity,sigma,shots\n-1,0,0.1,10\n"), DatasetFormatError);
  CHECK_THROWS_AS(parse_dataset_csv("tau_s,parity,sigma,shots\n0,0,-0.1,10\n"), DatasetFormatError);
  CHECK_THROWS_AS(parse_dataset_csv("tau_s,parity,sigma,shots\n0,0,0.1,0\n"), DatasetFormatError);
  CHECK_THROWS_AS(parse_dataset_csv("tau_s,parity,sigma,shots\n0,0,0.1,2.5\n"), DatasetFormatError);
  CHECK_THROWS_AS(parse_dataset_csv("tau_s,parity,sigma,shots\n0,abc,0.1,10\n"), DatasetFormatError);
  CHECK_THROWS_AS(parse_dataset_csv("tau_s,parity,sigma,shots\n0,0,0.1\n"), DatasetFormatError);
  const auto ok = parse_dataset_csv("# comment\ntau_s,parity,sigma,shots\r\n\n0.1, 0.5 ,0.08,100\r\n");
  REQUIRE(ok.records.size() == 1);
  CHECK(ok.records[0].parity == 0.5);
}

TEST_CASE("scan csv") {
  const std::vector<ScanPoint> pts{{8.0, 22.0, 0.02}, {15.0, 43.9, 0.021}};
  const auto text = format_scan_csv(pts, "gradient_vmm2", "delta_hz", "sigma_hz");
  CHECK(text.rfind("gradient_vmm2,delta_hz,sigma_hz\n", 0) == 0);
  const auto back = parse_scan_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[1].y == 43.9);
  CHECK_THROWS_AS(parse_scan_csv("x,y,s\n1,2,0\n"), DatasetFormatError);
  CHECK_THROWS_AS(parse_scan_csv("x,y,s\n1,2\n"), DatasetFormatError);
}

TEST_CASE("files and json") {
  const auto dir = std::filesystem::temp_directory_path() / "dfsq_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  ParityDataset d;
  d.records = {{0.0, 0.9, 0.04, 100}};
  write_text(dir / "a.csv", format_dataset_csv(d));
  CHECK(read_dataset_csv(dir / "a.csv").records.size() == 1);
  CHECK_THROWS(read_dataset_csv(dir / "missing.csv"));
  std::filesystem::remove_all(dir.parent_path());

  LinearFit lin;
  lin.slope = 2.975;
  lin.intercept = -2.4;
  const auto j = to_json(lin);
  CHECK(j.dump().find("2.975") != std::string::npos);
  const auto m = to_json(extract_moment(2.975, 0.002, 0.0, PhysicalConstants{}));
  CHECK(m.size() > 3);
}
