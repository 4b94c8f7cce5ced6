#include "gsdst/io.hpp"

#include "golden.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

using namespace gsdst;
namespace fs = std::filesystem;

namespace {

struct Workspace {
    fs::path dir;
    Workspace() {
        dir = fs::temp_directory_path() / ("gsdst_cli_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Workspace() { fs::remove_all(dir); }

    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(dir / name, std::ios::binary) << text;
        return dir / name;
    }
};

int run(const std::string& args) {
    const std::string cmd = std::string(GSDST_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string components_json(const ComplexVector& a, const ComplexVector& r, std::size_t length) {
    std::vector<GeometricComponent> c;
    for (std::size_t n = 0; n < a.size(); ++n) c.emplace_back(a[n], r[n]);
    const std::string body = decomposition_to_json(Decomposition(std::move(c)));
    return body.substr(0, body.size() - 1) + ",\"length\":" + std::to_string(length) + "}";
}

ComplexVector field(const nlohmann::json& doc, const char* name) {
    ComplexVector out;
    for (const auto& c : doc["components"]) out.emplace_back(c[name]["re"].get<double>(), c[name]["im"].get<double>());
    return out;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("synth writes the sequence") {
    Workspace ws;
    const auto cfg = ws.write("real.json", components_json(golden::real_a(), golden::real_r(), 9));
    REQUIRE(run("synth " + cfg.string() + " --out " + (ws.dir / "s.csv").string()) == 0);
    std::ifstream in(ws.dir / "s.csv");
    CHECK(read_sequence_csv(in) == golden::real_sequence());

    const auto dup = ws.write("dup.json", R"({"components":[{"a":{"re":1,"im":0},"r":{"re":3,"im":0}},)"
                                          R"({"a":{"re":2,"im":0},"r":{"re":3,"im":0}}],"length":9})");
    CHECK(run("synth " + dup.string()) == 2);
    CHECK(run("synth " + ws.write("bad.json", "{not json").string()) == 2);
    CHECK(run("synth " + (ws.dir / "missing.json").string()) == 2);
    CHECK(run("frobnicate") == 2);
}

TEST_CASE("synth then decompose reproduces the components") {
    Workspace ws;
    oracle::Gen gen(80);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t k = gen.index(1, 4);
        const ComplexVector a = gen.initial_terms(k);
        const ComplexVector r = gen.ratios(k);
        const auto cfg = ws.write("d.json", components_json(a, r, 2 * k + 3));
        REQUIRE(run("synth " + cfg.string() + " --out " + (ws.dir / "s.csv").string()) == 0);
        REQUIRE(run("decompose " + (ws.dir / "s.csv").string() + " --out " + (ws.dir / "d_out.json").string()) == 0);
        const auto doc = nlohmann::json::parse(read_text_file(ws.dir / "d_out.json"));
        CHECK(doc["k"].get<std::size_t>() == k);
        CHECK(oracle::set_rel_err(field(doc, "r"), r) < 1e-6);
        CHECK(oracle::set_rel_err(field(doc, "a"), a) < 1e-6);
    }
}

TEST_CASE("decompose reports and exit codes") {
    Workspace ws;
    std::ostringstream csv;
    write_sequence_csv(csv, golden::complex_sequence());
    const auto input = ws.write("c.csv", csv.str());
    const auto out = (ws.dir / "c.json").string();
    REQUIRE(run("decompose " + input.string() + " --out " + out) == 0);
    auto doc = nlohmann::json::parse(read_text_file(out));
    CHECK(doc["k"] == 2);
    CHECK(oracle::set_rel_err(field(doc, "r"), golden::complex_r()) < 1e-9);

    REQUIRE(run("decompose " + input.string() + " --noisy --k 2 --similarity rapid --seed 4 --out " + out) == 0);
    doc = nlohmann::json::parse(read_text_file(out));
    CHECK(doc["denoise_iterations"] == 1);
    CHECK(oracle::set_rel_err(field(doc, "a"), golden::complex_a()) < 1e-9);

    CHECK(run("decompose " + input.string() + " --k 3") == 3);
    CHECK(run("decompose " + input.string() + " --k 5") == 2);
    CHECK(run("decompose " + input.string() + " --k two") == 2);
    CHECK(run("decompose " + input.string() + " --similarity fast") == 2);
    CHECK(run("decompose " + ws.write("bad.csv", "index,re\n0,1\n").string()) == 2);

    // Pure noise: either an algorithm failure or a fit that explains nothing.
    oracle::Gen gen(81);
    std::vector<Complex> noise(30);
    for (auto& z : noise) z = gen.complex_box(1.0);
    std::ostringstream noisy;
    write_sequence_csv(noisy, ComplexSequence(noise));
    const auto noise_csv = ws.write("n.csv", noisy.str());
    const int code = run("decompose " + noise_csv.string() + " --noisy --k auto --out " + out);
    CHECK((code == 0 || code == 3));
    if (code == 0) CHECK(nlohmann::json::parse(read_text_file(out))["round_trip_nmse"].get<double>() > 0.05);
}

TEST_CASE("sim writes deterministic reports") {
    Workspace ws;
    const auto cfg = ws.write("ser.json",
                              R"({"experiment":"ser","k":2,"M":16,"gamma_db":[20,40],"sigma_db":10,"trials":50,"seed":3})");
    REQUIRE(run("sim " + cfg.string() + " --out " + (ws.dir / "a").string()) == 0);
    REQUIRE(run("sim " + cfg.string() + " --out " + (ws.dir / "b").string() + " --threads 3") == 0);
    const std::string a = read_text_file(ws.dir / "a" / "ser.csv");
    CHECK(a.rfind("k,M,gamma_db,sigma_db,noinfra_ser,orasic_ser,trials\n", 0) == 0);
    CHECK(a == read_text_file(ws.dir / "b" / "ser.csv"));

    const auto det = ws.write("det.json", R"({"experiment":"detection","k":[1,2],"gamma_db":30,"trials":20})");
    REQUIRE(run("sim " + det.string() + " --out " + (ws.dir / "d").string()) == 0);
    CHECK(read_text_file(ws.dir / "d" / "detection.csv").rfind("k,gamma_db,sigma_db,kind,rate,trials\n", 0) == 0);

    CHECK(run("sim " + ws.write("zero.json", R"({"experiment":"ser","trials":0})").string() + " --out " +
              (ws.dir / "z").string()) == 2);
    CHECK(run("sim " + cfg.string()) == 2);
}

}
