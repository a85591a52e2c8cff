#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>

#include "agecharge/common/errors.hpp"
#include "agecharge/common/seed.hpp"
#include "agecharge/io/config.hpp"
#include "fixtures.hpp"

using namespace agecharge;
using nlohmann::json;

namespace {

json default_json() { return io::to_json(fixtures::default_config()); }

std::string key_of(const json& j) {
    try {
        io::parse_config(j);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "<accepted>";
}

}  // namespace

TEST_CASE("shipped configs load") {
    CHECK_NOTHROW(io::load_config(io::default_config_path()));
    const auto desk = io::load_config(io::default_config_path().parent_path() / "desk_config.json");
    CHECK(desk.sim.n_r == 8);
    CHECK(desk.sim.n_x == 8);
}

TEST_CASE("serialisation round trip preserves the config and its hash") {
    const auto& c = fixtures::default_config();
    const auto back = io::parse_config(io::to_json(c));
    CHECK(io::config_hash(back) == io::config_hash(c));
    CHECK(io::to_json(back) == io::to_json(c));
}

TEST_CASE("hash changes with any value") {
    auto c = fixtures::default_config();
    const auto h0 = io::config_hash(c);
    c.sac.learning_rate *= 1.0000001;
    CHECK(io::config_hash(c) != h0);
    c = fixtures::default_config();
    c.battery.k_SEI *= 2.0;
    CHECK(io::config_hash(c) != h0);
    CHECK(io::hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("unknown keys are rejected by name") {
    auto j = default_json();
    j["sac"]["learning_rat"] = 1e-3;
    CHECK(key_of(j) == "sac.learning_rat");
    j = default_json();
    j["battery"]["E_act"]["k_foo"] = 1.0;
    CHECK(key_of(j) == "battery.E_act.k_foo");
    j = default_json();
    j["extra"] = json::object();
    CHECK(key_of(j) == "extra");
}

TEST_CASE("missing and invalid values name the key") {
    auto j = default_json();
    j["battery"].erase("L_pos");
    CHECK(key_of(j) == "battery.L_pos");
    j = default_json();
    j["battery"]["R_s_neg"] = -1.0;
    CHECK(key_of(j) == "battery.R_s_neg");
    j = default_json();
    j["env"]["dt"] = "five";
    CHECK(key_of(j) == "env.dt");
    j = default_json();
    j["sac"]["batch_size"] = 2.5;
    CHECK(key_of(j) == "sac.batch_size");
    j = default_json();
    j["compare"]["V_cv"] = 5.0;
    CHECK(key_of(j) == "compare.V_cv");
    j = default_json();
    auto& y = j["functions"]["U_pos"]["y"];
    std::swap(y[10], y[20]);
    CHECK(key_of(j) == "functions.U_pos");
}

TEST_CASE("optional sections fall back to defaults") {
    auto j = default_json();
    j.erase("sac");
    j.erase("compare");
    const auto c = io::parse_config(j);
    CHECK(c.sac.hidden_width == sac::SacConfig{}.hidden_width);
    CHECK(c.compare.V_cv == 4.5);
}

TEST_CASE("syntax errors report line and column") {
    const std::string text = "{\n  \"sim\": {\n    \"n_r\": 8,,\n  }\n}\n";
    try {
        io::parse_json_text(text, "broken.json");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("broken.json:3:") != std::string::npos);
    }
    const auto path = std::filesystem::temp_directory_path() / "agecharge_broken.json";
    std::ofstream(path) << text;
    CHECK_THROWS_AS(io::load_config(path), ConfigError);
    CHECK_THROWS_AS(io::load_config(path.string() + ".missing"), ConfigError);
    std::filesystem::remove(path);
}

TEST_CASE("seed splitting separates streams and indices") {
    CHECK(derive_seed(1, "init") != derive_seed(1, "eval"));
    CHECK(derive_seed(1, "init", 0) != derive_seed(1, "init", 1));
    CHECK(derive_seed(1, "init") != derive_seed(2, "init"));
    CHECK(derive_seed(7, "her", 3) == derive_seed(7, "her", 3));
    static_assert(fnv1a64("") == 0xcbf29ce484222325ULL);
    static_assert(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}
