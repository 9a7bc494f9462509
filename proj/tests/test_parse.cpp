#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "lawrisk/parse.hpp"

using namespace lawrisk;

namespace {

std::string message_of(auto&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

std::vector<double> samples_from(const std::string& text) {
  std::istringstream in(text);
  return parse_samples(in, "data.txt");
}

}  // namespace

TEST(ParseSamples, Basics) {
  EXPECT_EQ(samples_from("1\n2.5\n-3e2\n"), (std::vector<double>{1.0, 2.5, -300.0}));
  EXPECT_EQ(samples_from("# value\n4\n\n  5  \n"), (std::vector<double>{4.0, 5.0}));
  EXPECT_EQ(samples_from("7"), (std::vector<double>{7.0}));
  EXPECT_EQ(samples_from("1\r\n2\r\n"), (std::vector<double>{1.0, 2.0}));
}

TEST(ParseSamples, ErrorsReportLineNumbers) {
  EXPECT_EQ(message_of([] { samples_from("1\n2\nabc\n"); }), "data.txt:3: 'abc' is not a finite real");
  EXPECT_NE(message_of([] { samples_from("1\ninf\n"); }).find("data.txt:2:"), std::string::npos);
  EXPECT_NE(message_of([] { samples_from("1\nnan\n"); }).find("data.txt:2:"), std::string::npos);
  EXPECT_NE(message_of([] { samples_from("1 2\n"); }).find("data.txt:1:"), std::string::npos);
  // A '#' line is a header only on line 1.
  EXPECT_NE(message_of([] { samples_from("1\n# late\n"); }).find("data.txt:2:"), std::string::npos);
  EXPECT_THROW(samples_from("# header only\n"), domain_error);
  EXPECT_THROW(samples_from(""), domain_error);
}

TEST(ParseSamples, ReadFile) {
  const auto path = std::filesystem::temp_directory_path() / "lawrisk_parse_two_atoms.txt";
  std::ofstream(path) << "# two atoms\n-1\n1\n";
  EXPECT_EQ(read_samples(path.string()), (std::vector<double>{-1.0, 1.0}));
  const auto d = parse_distribution("empirical:" + path.string());
  EXPECT_EQ(d.kind(), distribution_kind::empirical);
  EXPECT_EQ(d.size(), 2u);
  EXPECT_THROW(read_samples("/nonexistent/file.txt"), io_error);
  EXPECT_THROW(parse_distribution("empirical:/nonexistent/file.txt"), io_error);
}

TEST(ParseDistribution, Families) {
  EXPECT_EQ(parse_distribution("uniform:-1,1").descriptor(), "uniform:-1,1");
  EXPECT_EQ(parse_distribution("normal:0,2").family(), "normal");
  EXPECT_EQ(parse_distribution("lognormal:0,1").family(), "lognormal");
  const auto pd = parse_distribution("pareto:1.5,2");
  const auto par = pd.params();
  EXPECT_EQ(std::vector<double>(par.begin(), par.end()), (std::vector<double>{1.5, 2.0}));
  EXPECT_EQ(parse_distribution("point:3").values().front(), 3.0);
  EXPECT_EQ(parse_distribution(" uniform: 0 , 2 ").descriptor(), "uniform:0,2");
}

TEST(ParseDistribution, Errors) {
  EXPECT_THROW(parse_distribution("uniform:0,0"), domain_error);
  EXPECT_THROW(parse_distribution("uniform:0"), domain_error);
  EXPECT_THROW(parse_distribution("uniform:0,1,2"), domain_error);
  EXPECT_THROW(parse_distribution("uniform:a,1"), domain_error);
  EXPECT_THROW(parse_distribution("normal:0,-1"), domain_error);
  EXPECT_THROW(parse_distribution("cauchy:0,1"), domain_error);
  EXPECT_THROW(parse_distribution("empirical:"), domain_error);
  EXPECT_THROW(parse_distribution("point:inf"), domain_error);
  EXPECT_NE(message_of([] { parse_distribution("gamma:1,2"); }).find("gamma:1,2"), std::string::npos);
}

TEST(ParseMeasure, AllForms) {
  EXPECT_EQ(parse_measure("es:0.9").name(), "es:0.9");
  EXPECT_EQ(parse_measure("es-minus:0.1").kind(), measure_kind::es_minus);
  EXPECT_EQ(parse_measure("inter-es:0.9").p(), 0.9);
  EXPECT_EQ(parse_measure("stdev").kind(), measure_kind::stdev);
  EXPECT_EQ(parse_measure("semidev-upper").kind(), measure_kind::semidev_upper);
  EXPECT_EQ(parse_measure("semidev-lower").kind(), measure_kind::semidev_lower);
  EXPECT_EQ(parse_measure("mean").kind(), measure_kind::mean);
  EXPECT_EQ(parse_measure("max").kind(), measure_kind::sample_max);
  const auto s = parse_measure("spectral:0.5,0;1,2");
  EXPECT_EQ(s.kind(), measure_kind::spectral);
  EXPECT_EQ(s.spec().breakpoints(), (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(s.spec().levels(), (std::vector<double>{0.0, 2.0}));
  EXPECT_EQ(s.name(), "spectral:0.5,0;1,2");
  // The name round-trips through the parser.
  EXPECT_EQ(parse_measure(s.name()).name(), s.name());
}

TEST(ParseMeasure, Errors) {
  EXPECT_THROW(parse_measure("es"), domain_error);
  EXPECT_THROW(parse_measure("es:1.2"), domain_error);
  EXPECT_THROW(parse_measure("es:0"), domain_error);
  EXPECT_THROW(parse_measure("stdev:2"), domain_error);
  EXPECT_THROW(parse_measure("var:0.9"), domain_error);
  EXPECT_THROW(parse_measure("spectral:"), domain_error);
  EXPECT_THROW(parse_measure("spectral:0.5,1;1,1.5"), domain_error);  // mass 1.25
  EXPECT_THROW(parse_measure("spectral:0.5,2;1,0"), domain_error);    // decreasing
  EXPECT_THROW(parse_measure("spectral:0.5,0;0.9,2"), domain_error);  // ends before 1
  EXPECT_THROW(parse_measure("spectral:0.5;1,2"), domain_error);
}

TEST(ParseOrlicz, Forms) {
  EXPECT_DOUBLE_EQ(parse_orlicz("power:2")(3.0), 9.0);
  EXPECT_DOUBLE_EQ(parse_orlicz("power-scaled:2")(3.0), 4.5);
  EXPECT_DOUBLE_EQ(parse_orlicz("expm1")(1.0), std::expm1(1.0));
  EXPECT_DOUBLE_EQ(parse_orlicz("linear-exp:2")(1.0), std::expm1(2.0));
  EXPECT_THROW(parse_orlicz("power:0.5"), domain_error);
  EXPECT_THROW(parse_orlicz("power"), domain_error);
  EXPECT_THROW(parse_orlicz("expm1:2"), domain_error);
  EXPECT_THROW(parse_orlicz("cosh"), domain_error);
}

TEST(ParseProcess, Forms) {
  EXPECT_EQ(parse_process("iid"), process_model::iid());
  EXPECT_EQ(parse_process("ar1:0.8"), process_model::ar1(0.8));
  EXPECT_EQ(parse_process("markov:4,0.5"), process_model::markov(4, 0.5));
  EXPECT_THROW(parse_process("ar1:1"), domain_error);
  EXPECT_THROW(parse_process("markov:4.5,0.5"), domain_error);
  EXPECT_THROW(parse_process("markov:1,0.5"), domain_error);
  EXPECT_THROW(parse_process("markov:4,0"), domain_error);
  EXPECT_THROW(parse_process("iid:3"), domain_error);
  EXPECT_THROW(parse_process("garch"), domain_error);
}

TEST(ParseNumberList, Forms) {
  EXPECT_EQ(parse_number_list("0.1,0.5,1", "--eps"), (std::vector<double>{0.1, 0.5, 1.0}));
  EXPECT_EQ(parse_number_list("100", "--ns"), (std::vector<double>{100.0}));
  EXPECT_EQ(message_of([] { parse_number_list("1,x", "--ns"); }), "--ns: 'x' is not a number");
  EXPECT_THROW(parse_number_list("", "--ns"), domain_error);
}
