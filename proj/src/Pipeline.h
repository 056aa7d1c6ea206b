#pragma once

#include "Cegar.h"
#include "ChcSystem.h"
#include "Proof.h"
#include "Smt.h"
#include "Transform.h"

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace horncfa {

struct RunConfig {
    Direction direction = Direction::Forward;
    Domain domain = Domain::PredCart;
    Refinement refinement = Refinement::Wp;
    PredSplit predSplit = PredSplit::Whole;
    double taskTimeoutSeconds = 60;
    int maxIterations = 200;
    long maxNodes = 50000;
    std::string solverCommand; // empty: defaultSolverCommand()
    int queryTimeoutMs = 10000;
    bool checkInvariants = false;
    bool logSmt = false;
};

struct SolveOutcome {
    enum class Answer { Sat, Unsat, Unknown, Error };
    Answer answer = Answer::Unknown;
    std::string reason; // Unknown/Error detail
    bool validated = false;
    std::optional<ModelDefs> model;         // Sat, forward only
    std::optional<Refutation> refutation;   // Unsat
    std::optional<ConcretePath> path;       // Unsafe counterexample (CFA level)
    std::shared_ptr<TransformResult> transform;
    CegarStats cegar;
    SolverStats solver;
    std::vector<std::string> notes;
    double wallSeconds = 0;
};

// Optional hook applied to the transformation result before verification;
// used by the fuzz harness for mutation testing of its own detectors.
using TransformMutation = std::function<void(TransformResult &)>;

SolveOutcome solveSystem(CHCSystem const & system, RunConfig const & config, SolverSession & session,
                         TransformMutation const & mutation = nullptr);

// Parses and solves a file with a fresh solver session; frontend failures
// come back as Answer::Error.
SolveOutcome solveFile(std::string const & path, RunConfig const & config);

std::string const & answerName(SolveOutcome::Answer a);

} // namespace horncfa
