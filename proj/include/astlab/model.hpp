#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "astlab/composition.hpp"
#include "astlab/error.hpp"
#include "astlab/homomorphism.hpp"
#include "astlab/learning.hpp"
#include "astlab/limits.hpp"
#include "astlab/system.hpp"

namespace astlab {

/// A system as stored in a model: plain or input-output, and either declared
/// in the source text or derived by a composition directive (derived systems
/// serialize as their directive, not as a declaration).
struct StoredSystem {
  AbstractSystem base;
  std::optional<IoPartition> io;
  bool declared = true;

  InputOutputSystem as_io() const {
    if (!io)
      throw UsageError(base.name() +
                       " is not an input-output system (no -> in its "
                       "declaration)");
    return InputOutputSystem(base, *io);
  }
};

struct LearningDecl {
  std::string algorithm, data, params, hypotheses, input, output;
};
struct TransferDecl {
  std::string source, target, knowledge, algorithm, hypotheses;
};
struct MultitaskDecl {
  std::vector<std::string> tasks;
  std::string algorithm;
};
struct MetaDecl {
  std::string algorithm, hypotheses, object;
};
struct HomoDecl {
  std::string from, to;
  std::map<std::size_t, ElementMap> maps;  // by component position
};

/// An ordered command: compose two systems, or check a named entity.
/// Homomorphism declarations ride along here so serialization keeps their
/// source position relative to the compositions they may reference.
struct Directive {
  enum class Kind { Parallel, Cascade, Homo, Check };
  Kind kind;
  std::string name;                   // created or checked name
  std::vector<std::string> operands;  // systems (compose) or from/to (homo)
  std::size_t z_left = 0, z_right = 0;
};

/// A named collection of sets, systems, learning structures, and ordered
/// directives: the unit of file I/O.
class Model {
 public:
  std::string name = "model";
  Limits limits = Limits::defaults();

  std::map<std::string, ComponentSet> sets;
  std::map<std::string, StoredSystem> systems;
  std::map<std::string, LearningDecl> learnings;
  std::map<std::string, TransferDecl> transfers;
  std::map<std::string, MultitaskDecl> multitasks;
  std::map<std::string, MetaDecl> metas;
  std::map<std::string, HomoDecl> homos;
  std::vector<Directive> directives;

  bool knows(const std::string& n) const {
    return sets.count(n) || systems.count(n) || learnings.count(n) ||
           transfers.count(n) || multitasks.count(n) || metas.count(n) ||
           homos.count(n);
  }

  const ComponentSet& set_named(const std::string& n) const {
    auto it = sets.find(n);
    if (it == sets.end()) throw UsageError("unknown set: " + n);
    return it->second;
  }

  const StoredSystem& system_named(const std::string& n) const {
    auto it = systems.find(n);
    if (it == systems.end()) throw UsageError("unknown system: " + n);
    return it->second;
  }

  /// Directory of declared sets, for dangling-reference validation.
  SetDirectory set_directory() const {
    SetDirectory d;
    for (const auto& [n, s] : sets) d.emplace(n, &s);
    return d;
  }

  LearningSystem build_learning(const std::string& n) const {
    auto it = learnings.find(n);
    if (it == learnings.end()) throw UsageError("unknown learning system: " + n);
    const LearningDecl& decl = it->second;
    LearningRoles roles{set_named(decl.data), set_named(decl.params),
                        set_named(decl.input), set_named(decl.output)};
    return build_learning_system(n, system_named(decl.algorithm).as_io(),
                                 system_named(decl.hypotheses).as_io(),
                                 std::move(roles));
  }

  TransferLearningSystem build_transfer_structure(const std::string& n) const {
    auto it = transfers.find(n);
    if (it == transfers.end())
      throw UsageError("unknown transfer system: " + n);
    const TransferDecl& decl = it->second;
    return build_transfer(build_learning(decl.source),
                          build_learning(decl.target),
                          set_named(decl.knowledge),
                          system_named(decl.algorithm).as_io(),
                          system_named(decl.hypotheses).as_io(), n);
  }

  MultiTaskLearningSystem build_multitask_structure(
      const std::string& n) const {
    auto it = multitasks.find(n);
    if (it == multitasks.end())
      throw UsageError("unknown multi-task system: " + n);
    const MultitaskDecl& decl = it->second;
    std::vector<LearningSystem> tasks;
    tasks.reserve(decl.tasks.size());
    for (const std::string& task : decl.tasks)
      tasks.push_back(build_learning(task));
    return build_multitask(std::move(tasks),
                           system_named(decl.algorithm).as_io(), n);
  }

  MetaLearningSystem build_meta_structure(const std::string& n) const {
    auto it = metas.find(n);
    if (it == metas.end()) throw UsageError("unknown meta system: " + n);
    const MetaDecl& decl = it->second;
    return build_meta(system_named(decl.algorithm).as_io(),
                      system_named(decl.hypotheses).as_io(),
                      build_learning(decl.object), n);
  }
};

}  // namespace astlab
