#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <string>

#include "json.hpp"

#include "test_util.hpp"

namespace {

std::string cli_path() {
    const char* env = std::getenv("SENTI_CLI");
    REQUIRE_MESSAGE(env != nullptr, "SENTI_CLI must point at the senti binary");
    return env;
}

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args, const testutil::TempDir& dir, const std::string& tag) {
    std::string out_file = dir.file("stdout-" + tag);
    std::string err_file = dir.file("stderr-" + tag);
    std::string command = cli_path() + " " + args + " > " + out_file + " 2> " + err_file;
    int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = testutil::read_file(out_file);
    result.err = testutil::read_file(err_file);
    return result;
}

const char* kToyCsv =
    "text,label\n"
    "OBE helps students learn effectively,1\n"
    "the curriculum is very good and helpful,1\n"
    "teachers are teaching good content,1\n"
    "this course helps me think clearly,1\n"
    "great course content helps a lot,1\n"
    "good practical outcomes for everyone,1\n"
    "I face many problems with the system,0\n"
    "too bad and not helpful at all,0\n"
    "the exam system has problems,0\n"
    "we face issues and problems daily,0\n"
    "confusing problems everywhere so bad,0\n"
    "bad experience with unclear outcomes,0\n";

}  // namespace

TEST_CASE("help exits 0 on every subcommand and shows defaults") {
    testutil::TempDir dir("senti-cli-help");
    RunResult top = run_cli("--help", dir, "top");
    CHECK(top.exit_code == 0);
    CHECK(top.out.find("summary") != std::string::npos);
    CHECK(top.out.find("explain") != std::string::npos);

    for (const std::string cmd : {"summary", "prep", "train", "evaluate", "compare", "explain"}) {
        RunResult r = run_cli(cmd + " --help", dir, "help-" + cmd);
        CHECK(r.exit_code == 0);
    }
    RunResult train_help = run_cli("train --help", dir, "train-help");
    CHECK(train_help.out.find("--lr.epochs") != std::string::npos);
    CHECK(train_help.out.find("300") != std::string::npos);  // defaults are visible
    CHECK(train_help.out.find("--transformer.d-model") != std::string::npos);
    RunResult explain_help = run_cli("explain --help", dir, "explain-help");
    CHECK(explain_help.out.find("--lime.samples") != std::string::npos);
    CHECK(explain_help.out.find("1000") != std::string::npos);
}

TEST_CASE("summary prints JSON on stdout and fails cleanly on a missing file") {
    testutil::TempDir dir("senti-cli-summary");
    testutil::write_file(dir.file("toy.csv"), kToyCsv);
    RunResult ok = run_cli("summary --dataset " + dir.file("toy.csv"), dir, "ok");
    CHECK(ok.exit_code == 0);
    nlohmann::json j = nlohmann::json::parse(ok.out);
    CHECK(j["class_counts"]["1"] == 6);
    CHECK(j["class_counts"]["0"] == 6);

    RunResult missing = run_cli("summary --dataset " + dir.file("nope.csv"), dir, "missing");
    CHECK(missing.exit_code == 2);
    CHECK(missing.err.find("error") != std::string::npos);

    testutil::write_file(dir.file("bad.csv"), "text,label\nok,7\n");
    RunResult bad = run_cli("summary --dataset " + dir.file("bad.csv"), dir, "bad");
    CHECK(bad.exit_code == 2);
    CHECK(bad.err.find("row 2") != std::string::npos);
}

TEST_CASE("train writes a model file that reloads to identical predictions") {
    testutil::TempDir dir("senti-cli-train");
    testutil::write_file(dir.file("toy.csv"), kToyCsv);
    std::string base = " --dataset " + dir.file("toy.csv") + " --seed 7 --test-fraction 0.25";

    RunResult train = run_cli("train --model nb --out " + dir.file("run") + base, dir, "train");
    REQUIRE(train.exit_code == 0);
    CHECK(testutil::read_file(dir.file("run/model_nb.json")).size() > 0);
    CHECK(testutil::read_file(dir.file("run/vocab.txt")).size() > 0);

    RunResult eval_a = run_cli(
        "evaluate --model-file " + dir.file("run/model_nb.json") + base, dir, "eval-a");
    RunResult eval_b = run_cli(
        "evaluate --model-file " + dir.file("run/model_nb.json") + base, dir, "eval-b");
    REQUIRE(eval_a.exit_code == 0);
    CHECK(eval_a.out == eval_b.out);
    nlohmann::json j = nlohmann::json::parse(eval_a.out);
    CHECK(j["model"] == "nb");
    CHECK(j["accuracy"].get<double>() >= 0.0);
}

TEST_CASE("identical train commands produce byte-identical model files") {
    testutil::TempDir dir("senti-cli-repro");
    testutil::write_file(dir.file("toy.csv"), kToyCsv);
    for (const std::string model : {"nb", "lr", "knn", "svm", "rf"}) {
        std::string base = "train --model " + model + " --dataset " + dir.file("toy.csv") +
                           " --seed 11 --test-fraction 0.25 --rf.trees 10";
        RunResult a = run_cli(base + " --out " + dir.file(model + "-a"), dir, model + "-a");
        RunResult b = run_cli(base + " --out " + dir.file(model + "-b"), dir, model + "-b");
        REQUIRE(a.exit_code == 0);
        REQUIRE(b.exit_code == 0);
        CHECK(testutil::read_file(dir.file(model + "-a/model_" + model + ".json")) ==
              testutil::read_file(dir.file(model + "-b/model_" + model + ".json")));
        CHECK(testutil::read_file(dir.file(model + "-a/vocab.txt")) ==
              testutil::read_file(dir.file(model + "-b/vocab.txt")));
    }
}

TEST_CASE("transformer training logs one row per epoch at batch size 16") {
    testutil::TempDir dir("senti-cli-tf");
    testutil::write_file(dir.file("toy.csv"), kToyCsv);
    std::string cmd = "train --model transformer --dataset " + dir.file("toy.csv") +
                      " --out " + dir.file("tf") +
                      " --seed 3 --test-fraction 0.25 --transformer.epochs 15"
                      " --transformer.batch-size 16 --transformer.d-model 8"
                      " --transformer.heads 2 --transformer.d-ff 8"
                      " --transformer.max-seq-len 12";
    RunResult r = run_cli(cmd, dir, "tf");
    REQUIRE(r.exit_code == 0);
    std::string log = testutil::read_file(dir.file("tf/train_log.csv"));
    CHECK(std::count(log.begin(), log.end(), '\n') == 16);  // header + 15 epochs
    CHECK(log.rfind("epoch,train_loss,train_acc,val_loss,val_acc\n", 0) == 0);

    // reproducibility of the weight file
    std::string model_a = testutil::read_file(dir.file("tf/model_transformer.json"));
    RunResult second = run_cli(
        "train --model transformer --dataset " + dir.file("toy.csv") + " --out " +
            dir.file("tf2") +
            " --seed 3 --test-fraction 0.25 --transformer.epochs 15"
            " --transformer.batch-size 16 --transformer.d-model 8"
            " --transformer.heads 2 --transformer.d-ff 8 --transformer.max-seq-len 12",
        dir, "tf2");
    REQUIRE(second.exit_code == 0);
    CHECK(model_a == testutil::read_file(dir.file("tf2/model_transformer.json")));
}

TEST_CASE("explain surfaces the word the stub model keys on") {
    testutil::TempDir dir("senti-cli-explain");
    testutil::write_file(dir.file("toy.csv"), kToyCsv);
    RunResult train = run_cli("train --model lr --dataset " + dir.file("toy.csv") +
                                  " --out " + dir.file("run") + " --seed 5 --test-fraction 0.25",
                              dir, "train");
    REQUIRE(train.exit_code == 0);

    RunResult r = run_cli("explain --model-file " + dir.file("run/model_lr.json") +
                              " --text \"obe helps a lot\" --seed 9",
                          dir, "explain");
    REQUIRE(r.exit_code == 0);
    nlohmann::json j = nlohmann::json::parse(r.out);
    REQUIRE(!j["word_weights"].empty());
    CHECK(j["word_weights"][0]["word"] == "helps");
    CHECK(j["word_weights"][0]["weight"].get<double>() > 0.0);
    CHECK(r.err.find('#') != std::string::npos);  // bar rendering on stderr

    RunResult empty = run_cli("explain --model-file " + dir.file("run/model_lr.json") +
                                  " --text \"\" --seed 9",
                              dir, "empty");
    CHECK(empty.exit_code == 2);
}

TEST_CASE("usage errors exit 2, computation failures exit 1") {
    testutil::TempDir dir("senti-cli-exits");
    testutil::write_file(dir.file("toy.csv"), kToyCsv);

    RunResult unknown_model = run_cli(
        "train --model boost --dataset " + dir.file("toy.csv") + " --out " + dir.file("x"), dir,
        "unknown");
    CHECK(unknown_model.exit_code == 2);

    RunResult unknown_flag = run_cli("summary --dataset x --frobnicate", dir, "flag");
    CHECK(unknown_flag.exit_code == 2);

    RunResult no_sub = run_cli("", dir, "nosub");
    CHECK(no_sub.exit_code == 2);

    // divergent LR learning rate is a computation failure
    RunResult diverged = run_cli("train --model lr --dataset " + dir.file("toy.csv") +
                                     " --out " + dir.file("div") +
                                     " --lr.learning-rate 1e200 --lr.epochs 5",
                                 dir, "diverged");
    CHECK(diverged.exit_code == 1);
    CHECK(diverged.err.find("non-finite") != std::string::npos);
}

TEST_CASE("evaluate rejects a vocabulary that does not match the model") {
    testutil::TempDir dir("senti-cli-hash");
    testutil::write_file(dir.file("toy.csv"), kToyCsv);
    RunResult train = run_cli("train --model nb --dataset " + dir.file("toy.csv") + " --out " +
                                  dir.file("run") + " --seed 1",
                              dir, "train");
    REQUIRE(train.exit_code == 0);
    testutil::write_file(dir.file("wrong_vocab.txt"), "alpha\nbeta\n");
    RunResult r = run_cli("evaluate --model-file " + dir.file("run/model_nb.json") +
                              " --vocab " + dir.file("wrong_vocab.txt") + " --dataset " +
                              dir.file("toy.csv"),
                          dir, "eval");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("vocab") != std::string::npos);
}

TEST_CASE("config file values apply and unknown keys are rejected") {
    testutil::TempDir dir("senti-cli-config");
    testutil::write_file(dir.file("toy.csv"), kToyCsv);
    // --config precedes the subcommand; dotted option names are quoted
    testutil::write_file(dir.file("senti.ini"), "[train]\nmodel=nb\n\"nb.alpha\"=2.5\n");
    RunResult ok = run_cli("--config " + dir.file("senti.ini") + " train --dataset " +
                               dir.file("toy.csv") + " --out " + dir.file("ok"),
                           dir, "config-ok");
    CHECK(ok.exit_code == 0);
    nlohmann::json model = nlohmann::json::parse(testutil::read_file(dir.file("ok/model_nb.json")));
    CHECK(model["params"]["alpha"].get<double>() == 2.5);

    // command-line flags override the config file
    RunResult override_run = run_cli("--config " + dir.file("senti.ini") + " train --nb.alpha 0.5" +
                                         " --dataset " + dir.file("toy.csv") + " --out " +
                                         dir.file("over"),
                                     dir, "config-override");
    CHECK(override_run.exit_code == 0);
    nlohmann::json over =
        nlohmann::json::parse(testutil::read_file(dir.file("over/model_nb.json")));
    CHECK(over["params"]["alpha"].get<double>() == 0.5);

    testutil::write_file(dir.file("bad.ini"), "[train]\nmodel=nb\nbogus_key=1\n");
    RunResult bad = run_cli("--config " + dir.file("bad.ini") + " train --dataset " +
                                dir.file("toy.csv") + " --out " + dir.file("bad"),
                            dir, "config-bad");
    CHECK(bad.exit_code == 2);
}

TEST_CASE("prep emits preprocessed CSV") {
    testutil::TempDir dir("senti-cli-prep");
    testutil::write_file(dir.file("toy.csv"),
                         "text,label\nThe teachers are teaching!,1\ntoo bad,0\n");
    RunResult r = run_cli("prep --dataset " + dir.file("toy.csv"), dir, "prep");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("text,label\n", 0) == 0);
    CHECK(r.out.find("teach teach,1") != std::string::npos);
}
