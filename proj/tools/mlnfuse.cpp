// Command-line front end: parse/ground/infer/learn on .mln knowledge bases,
// similarity-evidence generation, and the end-to-end multi-sensor pipeline.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mln/grounder.hpp"
#include "mln/inference.hpp"
#include "mln/learning.hpp"
#include "mln/parser.hpp"
#include "mln/pipeline.hpp"

using namespace mln;

namespace {

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void writeFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

KnowledgeBase loadKb(const std::string& path, const std::string& weightsPath) {
  KnowledgeBase kb = parseKb(readFile(path));
  if (!weightsPath.empty()) applyWeightsFile(kb, readFile(weightsPath));
  return kb;
}

nlohmann::json marginalsJson(const std::vector<QueryMarginal>& marginals) {
  nlohmann::json arr = nlohmann::json::array();
  for (const QueryMarginal& m : marginals) {
    nlohmann::json j;
    j["atom"] = m.atomText;
    j["p"] = m.probability;
    j["chains"] = m.perChain;
    if (m.chainDisagreement) j["chainDisagreement"] = true;
    arr.push_back(std::move(j));
  }
  return arr;
}

void printMarginals(const std::vector<QueryMarginal>& marginals) {
  for (const QueryMarginal& m : marginals)
    std::cout << "P(" << m.atomText << ") = " << m.probability
              << (m.chainDisagreement ? "  // chains disagree" : "") << "\n";
}

FusionModels modelsFromConfig(const std::string& configPath) {
  auto cfg = parseKeyValueConfig(readFile(configPath));
  return loadFusionModels(cfg, [](const std::string& p) { return readFile(p); });
}

std::vector<Tracklet> loadCorpusTracklets(const std::string& csvPath,
                                          const std::string& metaPath) {
  std::vector<Tracklet> tracklets = loadTrackletsCsv(readFile(csvPath));
  if (!metaPath.empty()) applyTrackletMeta(tracklets, readFile(metaPath));
  return tracklets;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov logic inference and multi-sensor fusion engine"};
  app.require_subcommand(1);

  uint64_t seed = 0;
  app.add_option("--seed", seed, "RNG seed");

  // ---- parse ----
  auto* cmdParse = app.add_subcommand("parse", "validate a knowledge base");
  std::string kbPath, weightsPath;
  bool doPrint = false;
  cmdParse->add_option("--kb", kbPath, "knowledge base (.mln)")->required();
  cmdParse->add_option("--weights", weightsPath, "weights file override");
  cmdParse->add_flag("--print", doPrint, "pretty-print the canonical form");

  // ---- ground ----
  auto* cmdGround = app.add_subcommand("ground", "instantiate the network");
  std::string evidencePath, queryPath, outPath;
  double maxClauses = 5e6;
  cmdGround->add_option("--kb", kbPath)->required();
  cmdGround->add_option("--evidence", evidencePath)->required();
  cmdGround->add_option("--query", queryPath, "query file");
  cmdGround->add_option("--out", outPath, "network dump destination");
  cmdGround->add_option("--max-clauses", maxClauses, "ground clause ceiling");

  // ---- infer ----
  auto* cmdInfer = app.add_subcommand("infer", "marginal or MAP inference");
  InferenceParams inferParams;
  bool useMap = false, useExact = false;
  std::string jsonPath;
  cmdInfer->add_option("--kb", kbPath)->required();
  cmdInfer->add_option("--evidence", evidencePath)->required();
  cmdInfer->add_option("--query", queryPath)->required();
  cmdInfer->add_option("--weights", weightsPath, "weights file override");
  cmdInfer->add_option("--samples", inferParams.samples);
  cmdInfer->add_option("--burn-in", inferParams.burnIn);
  cmdInfer->add_option("--chains", inferParams.chains);
  cmdInfer->add_option("--hard-weight", inferParams.hardWeight);
  cmdInfer->add_flag("--map", useMap, "MAP state instead of marginals");
  cmdInfer->add_flag("--exact", useExact, "exact enumeration (small networks)");
  cmdInfer->add_option("--out", outPath, "result file");
  cmdInfer->add_option("--json", jsonPath, "JSON result file");

  // ---- learn ----
  auto* cmdLearn = app.add_subcommand("learn", "discriminative weight learning");
  std::vector<std::string> instanceSpecs;
  LearnParams learnParams;
  bool mapCounts = false, exactCounts = false, noAverage = false;
  cmdLearn->add_option("--kb", kbPath)->required();
  cmdLearn
      ->add_option("--instance", instanceSpecs,
                   "training instance as evidence.db=labels.db")
      ->required();
  cmdLearn->add_option("--out", outPath, "weights file destination");
  cmdLearn->add_option("--iterations", learnParams.iterations);
  cmdLearn->add_option("--lr", learnParams.learningRate);
  cmdLearn->add_option("--sigma", learnParams.l2Sigma, "L2 prior std (<=0 off)");
  cmdLearn->add_option("--samples-per-gradient", learnParams.samplesPerGradient);
  cmdLearn->add_flag("--map-counts", mapCounts, "perceptron-style MAP counts");
  cmdLearn->add_flag("--exact", exactCounts, "exact expectations");
  cmdLearn->add_flag("--no-average", noAverage, "return last iterate");

  // ---- fuse ----
  auto* cmdFuse = app.add_subcommand(
      "fuse", "emit cross-sensor similarity evidence for tracklet pairs");
  std::string trackletsPath, metaPath, configPath;
  double minGap = -60.0, maxGap = 900.0;
  cmdFuse->add_option("--kb", kbPath, "association KB (predicate decls)")
      ->required();
  cmdFuse->add_option("--tracklets", trackletsPath)->required();
  cmdFuse->add_option("--meta", metaPath, "tracklet sidecar JSON");
  cmdFuse->add_option("--config", configPath, "fusion model config")->required();
  cmdFuse->add_option("--out", outPath, "evidence file destination");
  cmdFuse->add_option("--min-gap", minGap, "min start-after-end gap (s)");
  cmdFuse->add_option("--max-gap", maxGap, "max start-after-end gap (s)");

  // ---- pipeline ----
  auto* cmdPipeline =
      app.add_subcommand("pipeline", "hierarchical multi-sensor event recognition");
  std::string zonesPath, kbScenePath, kbSensorPath, kbAssocPath, kbTopPath,
      kbMonoPath;
  PipelineConfig pipeConfig;
  bool monolithic = false;
  cmdPipeline->add_option("--tracklets", trackletsPath)->required();
  cmdPipeline->add_option("--meta", metaPath);
  cmdPipeline->add_option("--zones", zonesPath)->required();
  cmdPipeline->add_option("--config", configPath)->required();
  cmdPipeline->add_option("--kb-scene", kbScenePath);
  cmdPipeline->add_option("--kb-sensor", kbSensorPath);
  cmdPipeline->add_option("--kb-assoc", kbAssocPath);
  cmdPipeline->add_option("--kb-top", kbTopPath);
  cmdPipeline->add_option("--kb-mono", kbMonoPath, "monolithic KB");
  cmdPipeline->add_flag("--monolithic", monolithic, "single-network mode");
  cmdPipeline->add_option("--window", pipeConfig.windowLength, "seconds");
  cmdPipeline->add_option("--overlap", pipeConfig.overlap, "seconds");
  cmdPipeline->add_option("--samples", pipeConfig.inference.samples);
  cmdPipeline->add_option("--chains", pipeConfig.inference.chains);
  cmdPipeline->add_option("--forward-threshold", pipeConfig.forwardThreshold);
  cmdPipeline->add_option("--json", jsonPath, "JSON report destination");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmdParse) {
      KnowledgeBase kb = loadKb(kbPath, weightsPath);
      KnowledgeBase again = parseKb(prettyPrint(kb));
      if (!structurallyEqual(kb, again)) {
        std::cerr << "round-trip mismatch (parser bug?)\n";
        return 1;
      }
      std::cout << kb.schemas().size() << " predicates, "
                << kb.formulas().size() << " formulas; round-trip ok\n";
      if (doPrint) std::cout << prettyPrint(kb);
      return 0;
    }

    if (*cmdGround) {
      KnowledgeBase kb = loadKb(kbPath, "");
      EvidenceSet evidence = parseEvidence(readFile(evidencePath), kb);
      QuerySpec queries;
      if (!queryPath.empty()) queries = parseQuery(readFile(queryPath), kb);
      GroundOptions options;
      options.maxGroundClauses = maxClauses;
      GroundNetwork net = ground(kb, evidence, queries, options);
      std::cout << net.atoms.size() << " atoms, " << net.clauses.size()
                << " clauses, " << net.openAtomCount() << " open\n";
      if (!outPath.empty()) writeFile(outPath, dumpNetwork(net));
      return 0;
    }

    if (*cmdInfer) {
      KnowledgeBase kb = loadKb(kbPath, weightsPath);
      EvidenceSet evidence = parseEvidence(readFile(evidencePath), kb);
      QuerySpec queries = parseQuery(readFile(queryPath), kb);
      GroundNetwork net = ground(kb, evidence, queries);
      inferParams.rngSeed = seed;

      if (useMap) {
        World w = mapInference(net, inferParams);
        std::ostringstream os;
        for (int q : net.queryAtoms)
          os << net.atomText(q) << " = " << (w.assignment[q] ? 1 : 0) << "\n";
        os << "# score " << w.score << ", unsatisfied hard clauses "
           << w.hardUnsatisfied << "\n";
        std::cout << os.str();
        if (!outPath.empty()) writeFile(outPath, os.str());
        return 0;
      }

      MarginalResult result = useExact
                                  ? exactMarginals(net, net.queryAtoms)
                                  : gibbsMarginals(net, net.queryAtoms,
                                                   inferParams);
      printMarginals(result.marginals);
      if (!outPath.empty()) {
        std::ostringstream os;
        for (const QueryMarginal& m : result.marginals)
          os << "P(" << m.atomText << ") = " << m.probability << "\n";
        writeFile(outPath, os.str());
      }
      if (!jsonPath.empty()) {
        nlohmann::json j;
        j["marginals"] = marginalsJson(result.marginals);
        j["samplesPerChain"] = result.samplesPerChain;
        j["chains"] = result.chains;
        writeFile(jsonPath, j.dump(1) + "\n");
      }
      return 0;
    }

    if (*cmdLearn) {
      KnowledgeBase kb = loadKb(kbPath, "");
      std::vector<TrainingInstance> instances;
      for (const std::string& spec : instanceSpecs) {
        size_t eq = spec.find('=');
        if (eq == std::string::npos)
          throw std::runtime_error("--instance expects evidence.db=labels.db");
        TrainingInstance inst;
        inst.evidence = parseEvidence(readFile(spec.substr(0, eq)), kb);
        inst.labels = parseEvidence(readFile(spec.substr(eq + 1)), kb);
        instances.push_back(std::move(inst));
      }
      learnParams.rngSeed = seed;
      learnParams.averaging = !noAverage;
      if (mapCounts) learnParams.estimator = LearnParams::Estimator::MapCounts;
      if (exactCounts) learnParams.estimator = LearnParams::Estimator::Exact;
      std::vector<double> weights = learnWeights(kb, instances, learnParams);
      for (size_t i = 0; i < weights.size(); ++i)
        kb.formulas()[i].weight = kb.formulas()[i].hard
                                      ? kb.formulas()[i].weight
                                      : weights[i];
      std::string text = weightsToText(kb);
      std::cout << text;
      if (!outPath.empty()) writeFile(outPath, text);
      return 0;
    }

    if (*cmdFuse) {
      KnowledgeBase kb = loadKb(kbPath, "");
      std::vector<Tracklet> tracklets =
          loadCorpusTracklets(trackletsPath, metaPath);
      FusionModels models = modelsFromConfig(configPath);
      std::vector<std::string> warnings;
      std::ostringstream os;
      os.precision(6);
      for (size_t i = 0; i < tracklets.size(); ++i)
        for (size_t j = 0; j < tracklets.size(); ++j) {
          if (i == j || tracklets[i].sensorId == tracklets[j].sensorId)
            continue;
          double gap = tracklets[j].tStart - tracklets[i].tEnd;
          if (gap < minGap || gap > maxGap) continue;
          for (const EvidenceRecord& rec :
               emitSimilarityEvidence(tracklets[i], tracklets[j], models, kb,
                                      &warnings))
            os << rec.p << ' ' << toString(rec.atom, kb) << "\n";
        }
      for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
      std::cout << os.str();
      if (!outPath.empty()) writeFile(outPath, os.str());
      return 0;
    }

    if (*cmdPipeline) {
      std::vector<Tracklet> tracklets =
          loadCorpusTracklets(trackletsPath, metaPath);
      std::vector<Zone> zones = loadZonesJson(readFile(zonesPath));
      FusionModels models = modelsFromConfig(configPath);
      pipeConfig.inference.rngSeed = seed;

      PipelineResult result;
      if (monolithic) {
        if (kbMonoPath.empty())
          throw std::runtime_error("--monolithic requires --kb-mono");
        KnowledgeBase kbMono = loadKb(kbMonoPath, "");
        result = runMonolithic(kbMono, tracklets, zones, models, pipeConfig);
      } else {
        if (kbScenePath.empty() || kbSensorPath.empty() ||
            kbAssocPath.empty() || kbTopPath.empty())
          throw std::runtime_error(
              "hierarchical mode requires --kb-scene --kb-sensor --kb-assoc "
              "--kb-top");
        HierarchicalInputs inputs;
        inputs.kbScene = loadKb(kbScenePath, "");
        inputs.kbSensor = loadKb(kbSensorPath, "");
        inputs.kbAssoc = loadKb(kbAssocPath, "");
        inputs.kbTop = loadKb(kbTopPath, "");
        inputs.tracklets = std::move(tracklets);
        inputs.zones = std::move(zones);
        inputs.models = std::move(models);
        inputs.config = pipeConfig;
        result = runHierarchical(inputs);
      }

      for (const std::string& w : result.warnings)
        std::cerr << "warning: " << w << "\n";
      printMarginals(result.topMarginals);
      if (!jsonPath.empty()) {
        nlohmann::json j;
        j["complexEvents"] = marginalsJson(result.topMarginals);
        nlohmann::json windows = nlohmann::json::array();
        for (const auto& wm : result.windowMarginals)
          windows.push_back({{"window", wm.window},
                             {"sensor", wm.sensorId},
                             {"atom", wm.atomText},
                             {"p", wm.probability}});
        j["windowMarginals"] = windows;
        nlohmann::json prov = nlohmann::json::array();
        for (const SoftForward& f : result.provenance)
          prov.push_back({{"atom", f.atomText},
                          {"p", f.probability},
                          {"window", f.window},
                          {"sensor", f.sensorId},
                          {"stage", f.stage}});
        j["provenance"] = prov;
        j["warnings"] = result.warnings;
        writeFile(jsonPath, j.dump(1) + "\n");
      }
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const UnsatisfiableError& e) {
    std::cerr << "unsatisfiable: " << e.what() << "\n";
    return 3;
  } catch (const ResourceLimitError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
