#include "wena/toml.hpp"

#include "wena/error.hpp"
#include "wena/pipeline.hpp"

#include "support/tempdir.hpp"

#include <doctest.h>

using namespace wena;

TEST_CASE("toml subset: scalars, tables, arrays, comments") {
    const auto table = TomlTable::parse(R"(
# run configuration
manifest = "cohort/manifest.csv"   # inline comment
threshold = 0.2
folds = 10
detrend = true
quiet = false

[qc]
max_translation_mm = 2.5

[ae.edges]
hidden = 50
epochs = 500

[stack]
first_layer_models = ["etr", "rr"]
layers = 3
mix = [1.5, 2.5, -3]
)");
    CHECK(*table.get_string("manifest") == "cohort/manifest.csv");
    CHECK(*table.get_number("threshold") == 0.2);
    CHECK(*table.get_number("folds") == 10.0);
    CHECK(*table.get_bool("detrend"));
    CHECK_FALSE(*table.get_bool("quiet"));
    CHECK(*table.get_number("qc.max_translation_mm") == 2.5);
    CHECK(*table.get_number("ae.edges.hidden") == 50.0);
    CHECK(*table.get_string_array("stack.first_layer_models") ==
          std::vector<std::string>{"etr", "rr"});
    CHECK(*table.get_number_array("stack.mix") == std::vector<double>{1.5, 2.5, -3.0});
    CHECK_FALSE(table.get_string("missing").has_value());
    CHECK_THROWS_AS(table.get_number("manifest"), Error);  // type mismatch
}

TEST_CASE("toml parse errors") {
    CHECK_THROWS_AS(TomlTable::parse("key"), Error);
    CHECK_THROWS_AS(TomlTable::parse("[unterminated"), Error);
    CHECK_THROWS_AS(TomlTable::parse("x = [1, 2"), Error);
    CHECK_THROWS_AS(TomlTable::parse("x = zzz"), Error);
}

TEST_CASE("run config from toml with documented defaults") {
    const RunConfig defaults = load_run_config(TomlTable::parse(""));
    CHECK(defaults.threshold == 0.20);
    CHECK(defaults.mi_bins == 16);
    CHECK(defaults.folds == 10);
    CHECK(defaults.fc_method == FcMethod::Pearson);
    CHECK(defaults.detrend_series);
    CHECK(defaults.qc.max_translation_mm == 2.5);
    CHECK(defaults.qc.max_rotation_deg == 2.5);
    CHECK(defaults.qc.max_mean_fd == 0.5);
    CHECK(defaults.ae_edges.hidden == 50);
    CHECK(defaults.ae_edges.epochs == 500);
    CHECK(defaults.ae_edges.learning_rate == 0.1);
    CHECK(defaults.ae_edges.momentum == 0.9);
    CHECK(defaults.ae_edges.epsilon == 1e-4);
    CHECK(defaults.stack.layers == 2);
    CHECK(defaults.stack.inner_folds == 5);
    REQUIRE(defaults.stack.first_layer_models.size() == 2);
    CHECK(defaults.stack.first_layer_models[0].kind == RegressorKind::EnsembleTree);
    CHECK(defaults.stack.first_layer_models[1].kind == RegressorKind::Ridge);
    CHECK(defaults.stack.fusion_models.size() == 2);

    const RunConfig custom = load_run_config(TomlTable::parse(R"(
manifest = "m.csv"
fc_method = "mi"
mi_bins = 8
threshold = 0.3
seed = 99

[ae.edges]
hidden = 10
epochs = 25

[stack]
layers = 3
first_layer_models = ["ridge"]
fusion_models = ["ridge"]

[models.ridge]
lambda = 0.5

[models.etr]
trees = 7
)"));
    CHECK(custom.fc_method == FcMethod::MutualInformation);
    CHECK(custom.mi_bins == 8);
    CHECK(custom.seed == 99);
    CHECK(custom.ae_edges.hidden == 10);
    CHECK(custom.ae_graph.hidden == 50);  // untouched block keeps defaults
    CHECK(custom.stack.layers == 3);
    REQUIRE(custom.stack.first_layer_models.size() == 1);
    CHECK(custom.stack.first_layer_models[0].kind == RegressorKind::Ridge);
    CHECK(custom.stack.first_layer_models[0].get("lambda", -1.0) == 0.5);
    // [models.etr] applies to the inner models (still their default list)
    CHECK(custom.stack.inner_models[0].get("trees", -1.0) == 7.0);
}
