#include "irisvigil/cli.hpp"
#include "irisvigil/image_io.hpp"
#include "irisvigil/pipeline.hpp"

#include "support.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace irisvigil {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "irisvigil");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("irisvigil_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string eye_pgm(std::uint64_t seed = 1) const {
    const auto spec = synth::make_suite(1, false, seed).front();
    const std::string p = path("eye.pgm");
    io::write_pgm(p, synth::render(spec).image);
    return p;
  }

  fs::path dir_;
};

TEST_F(CliTest, FilterWritesSameExtentsAndMatchesLibrary) {
  const std::string in = eye_pgm();
  const Outcome r = run_cli({"filter", in, "--out", path("f.pgm")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const GrayImage written = io::read_image(path("f.pgm"));
  const GrayImage source = io::read_image(in);
  ASSERT_EQ(written.rows(), source.rows());
  ASSERT_EQ(written.cols(), source.cols());
  const auto expected = io::quantize(apply_filter(source, PipelineConfig{}.filter_for(128, 128)));
  EXPECT_TRUE((io::quantize(written) == expected).all());
}

TEST_F(CliTest, TruncatedInputIsUsageError) {
  const std::string in = eye_pgm();
  std::ifstream src(in, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(src)), {});
  std::ofstream(path("cut.pgm"), std::ios::binary) << bytes.substr(0, 200);
  const Outcome r = run_cli({"filter", path("cut.pgm"), "--out", path("f.pgm")});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("truncated"), std::string::npos) << r.err;
}

TEST_F(CliTest, MissingFileIsUsageError) {
  EXPECT_EQ(run_cli({"pupil", path("nope.pgm")}).code, cli::kExitInput);
}

TEST_F(CliTest, PupilJson) {
  const auto spec = synth::make_suite(1, false, 1).front();
  const Outcome r = run_cli({"pupil", eye_pgm()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["corrected"].get<bool>());
  EXPECT_LE(std::hypot(j["cx"].get<double>() - spec.center.x, j["cy"].get<double>() - spec.center.y), 2.0);

  const json raw = json::parse(run_cli({"pupil", eye_pgm(), "--no-correct"}).out);
  EXPECT_FALSE(raw["corrected"].get<bool>());
  EXPECT_EQ(raw["cx"], raw["raw_cx"]);
}

TEST_F(CliTest, BlankImageReportsError) {
  io::write_pgm(path("blank.pgm"), GrayImage::Constant(64, 64, 0.5));
  const Outcome r = run_cli({"pupil", path("blank.pgm")});
  EXPECT_EQ(r.code, cli::kExitAlgorithm);
  EXPECT_TRUE(json::parse(r.out).contains("error"));
}

TEST_F(CliTest, IrisMethods) {
  const auto spec = synth::make_suite(1, false, 1).front();
  const std::string in = eye_pgm();
  const Outcome e = run_cli({"iris", in, "--method", "entropy", "--mask", path("e.pgm"), "--trace", path("t.csv")});
  ASSERT_EQ(e.code, cli::kExitOk) << e.out << e.err;
  EXPECT_NEAR(json::parse(e.out)["outer_radius"].get<double>(), spec.iris_radius, 2.0);
  EXPECT_TRUE(fs::exists(path("t.csv")));

  const Outcome g = run_cli({"iris", in, "--method", "gabor", "--mask", path("g.pgm"), "--pca", path("p.csv")});
  ASSERT_EQ(g.code, cli::kExitOk) << g.err;
  const GrayImage mask = io::read_image(path("g.pgm"));
  const Mask truth = synth::iris_mask(synth::render(spec).truth, 128, 128);
  EXPECT_GE(mask_iou((mask > 0.5).cast<std::uint8_t>(), truth), 0.85);

  EXPECT_EQ(run_cli({"iris", in, "--method", "hough"}).code, cli::kExitInput);
}

TEST_F(CliTest, EvalPreservesManifestOrder) {
  std::ofstream(path("m.txt")) << [] {
    std::ostringstream s;
    synth::write_manifest(s, synth::make_suite(4, false, 9));
    return s.str();
  }();
  const Outcome r = run_cli({"eval", path("m.txt"), "--out", path("r.csv"), "--jobs", "3"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  std::ifstream csv(path("r.csv"));
  std::string line;
  std::getline(csv, line);
  for (int i = 0; i < 4; ++i) {
    ASSERT_TRUE(std::getline(csv, line));
    EXPECT_EQ(line.substr(0, line.find(',')), "eye00" + std::to_string(i));
  }
  EXPECT_FALSE(std::getline(csv, line));
  EXPECT_GE(json::parse(r.out)["gabor_success_rate"].get<double>(), 0.75);
}

TEST_F(CliTest, EmptyOrBrokenManifest) {
  std::ofstream(path("empty.txt")) << "# nothing\n";
  EXPECT_EQ(run_cli({"eval", path("empty.txt")}).code, cli::kExitInput);
  std::ofstream(path("bad.txt")) << "id=x rows=abc\n";
  EXPECT_EQ(run_cli({"eval", path("bad.txt")}).code, cli::kExitInput);
}

TEST_F(CliTest, Vigilance) {
  const json v = json::parse(run_cli({"vigilance", "--f", "10", "--t", "0.15"}).out);
  EXPECT_EQ(v["label"], "Vigilant");
  EXPECT_FALSE(v["alert"].get<bool>());

  const json deep = json::parse(run_cli({"vigilance", "--f", "10", "--t", "30"}).out);
  EXPECT_TRUE(deep["alert"].get<bool>());
  EXPECT_EQ(deep["level"].get<double>(), 100.0);

  std::ofstream(path("empty.stream")) << "";
  const Outcome s = run_cli({"vigilance", "--stream", path("empty.stream")});
  ASSERT_EQ(s.code, cli::kExitOk) << s.err;
  EXPECT_TRUE(json::parse(s.out)["alert"].get<bool>());

  EXPECT_EQ(run_cli({"vigilance", "--f", "-1", "--t", "1"}).code, cli::kExitInput);
  EXPECT_EQ(run_cli({"vigilance"}).code, cli::kExitInput);
}

TEST_F(CliTest, SurfaceCsv) {
  const Outcome r = run_cli({"surface", "--f-steps", "2", "--t-steps", "2"});
  ASSERT_EQ(r.code, cli::kExitOk);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "f,T,level");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4);
  EXPECT_EQ(run_cli({"surface", "--f-steps", "0"}).code, cli::kExitInput);
}

TEST_F(CliTest, ManifestAndSynth) {
  ASSERT_EQ(run_cli({"manifest", "--count", "2", "--seed", "4", "--out", path("m.txt")}).code, cli::kExitOk);
  const Outcome r = run_cli({"synth", path("m.txt"), "--out-dir", path("eyes")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(path("eyes/eye000.pgm")));
  EXPECT_TRUE(fs::exists(path("eyes/eye001.json")));
  std::ifstream sidecar(path("eyes/eye000.json"));
  EXPECT_EQ(json::parse(sidecar)["rng"], "mt19937_64");
}

TEST_F(CliTest, DefaultsParseBack) {
  const Outcome r = run_cli({"defaults"});
  ASSERT_EQ(r.code, cli::kExitOk);
  const std::string pipeline_part = r.out.substr(0, r.out.find("\n\n"));
  std::istringstream in(pipeline_part);
  const PipelineConfig c = parse_config(in);
  EXPECT_FALSE(c.d0.has_value());
  EXPECT_EQ(c.pupil.template_size, 31);
}

TEST_F(CliTest, UnknownSubcommandIsUsageError) {
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kExitInput);
  EXPECT_EQ(run_cli({}).code, cli::kExitInput);
}

TEST(ImageIo, PgmRoundTripIsBitExact) {
  std::mt19937_64 rng(3);
  const Image<std::uint8_t> px = io::quantize(testing::random_image(9, 13, rng));
  std::stringstream buf;
  io::write_pgm(buf, px);
  const GrayImage back = io::read_pgm(buf);
  EXPECT_TRUE((io::quantize(back) == px).all());
}

TEST(ImageIo, PgmHeaderComments) {
  std::string bytes = "P5\n# made by hand\n2 1\n255\n";
  bytes += static_cast<char>(0);
  bytes += static_cast<char>(255);
  std::istringstream in(bytes);
  const GrayImage img = io::read_pgm(in);
  EXPECT_EQ(img(0, 0), 0.0);
  EXPECT_EQ(img(0, 1), 1.0);
}

TEST(ImageIo, RejectsMalformedPgm) {
  for (std::string bytes : {std::string("P2\n1 1\n255\n0"), std::string("P5\n1 1\n65535\n00"),
                            std::string("P5\n4 4\n255\nab")}) {
    std::istringstream in(bytes);
    EXPECT_TRUE(testing::throws_code(ErrorCode::ParseError, [&] { io::read_pgm(in); })) << bytes;
  }
}

TEST(PipelineConfig, ParsesKnownKeysAndRejectsOthers) {
  std::istringstream in("filter.d0 = 9.5\npupil.template = 21  # smaller\nentropy.e_max=0.2\npupil.correct = false\n");
  const PipelineConfig c = parse_config(in);
  EXPECT_EQ(*c.d0, 9.5);
  EXPECT_EQ(c.pupil.template_size, 21);
  EXPECT_EQ(c.pupil.mask.window, 21);
  EXPECT_EQ(c.entropy.e_max, 0.2);
  EXPECT_FALSE(c.pupil.correct);

  for (const char* text : {"filter.q = 1\n", "filter.d0 = fast\n", "pupil.template\n", "pupil.binarize = mean\n"}) {
    std::istringstream bad(text);
    EXPECT_TRUE(testing::throws_code(ErrorCode::ParseError, [&] { parse_config(bad); })) << text;
  }
}

TEST(PipelineConfig, WriteThenParseIsIdentity) {
  PipelineConfig c;
  c.d0 = 7.25;
  c.gabor.gamma = 0.75;
  c.classify.components = 4;
  std::stringstream text;
  write_config(text, c);
  const PipelineConfig back = parse_config(text);
  EXPECT_EQ(*back.d0, 7.25);
  EXPECT_EQ(back.gabor.gamma, 0.75);
  EXPECT_EQ(back.classify.components, 4);
}

TEST(Evaluate, ParallelMatchesSerial) {
  const auto specs = synth::make_suite(3, true, 21);
  const auto serial = evaluate_all(specs, {}, 1);
  const auto parallel = evaluate_all(specs, {}, 3);
  std::ostringstream a, b;
  write_evaluation_csv(a, serial);
  write_evaluation_csv(b, parallel);
  EXPECT_EQ(a.str(), b.str());
}

}  // namespace
}  // namespace irisvigil
