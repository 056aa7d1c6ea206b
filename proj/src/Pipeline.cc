#include "Pipeline.h"

#include "ChcParser.h"

#include <chrono>

namespace horncfa {

namespace {
double monotonicSeconds() {
    using namespace std::chrono;
    return duration_cast<duration<double>>(steady_clock::now().time_since_epoch()).count();
}
} // namespace

std::string const & answerName(SolveOutcome::Answer a) {
    static const std::string names[] = {"sat", "unsat", "unknown", "error"};
    return names[static_cast<int>(a)];
}

SolveOutcome solveSystem(CHCSystem const & system, RunConfig const & config, SolverSession & session,
                         TransformMutation const & mutation) {
    double t0 = monotonicSeconds();
    SolveOutcome out;
    out.transform = std::make_shared<TransformResult>(transform(system, config.direction));
    if (mutation) { mutation(*out.transform); }

    CegarOptions cegarOpts;
    cegarOpts.domain = config.domain;
    cegarOpts.refinement = config.refinement;
    cegarOpts.predSplit = config.predSplit;
    cegarOpts.maxIterations = config.maxIterations;
    cegarOpts.maxNodes = config.maxNodes;
    cegarOpts.checkInvariants = config.checkInvariants;
    if (config.taskTimeoutSeconds > 0) { cegarOpts.deadlineSeconds = t0 + config.taskTimeoutSeconds; }

    if (config.refinement != Refinement::Wp && !session.supportsInterpolants()) {
        out.notes.push_back("interpolation not supported by the solver, using wp refinement");
        cegarOpts.refinement = Refinement::Wp;
    }
    if (config.direction == Direction::Backward) {
        // a backward Safe answer carries no model; the ARG re-check is the
        // validation evidence instead
        cegarOpts.checkInvariants = true;
    }

    CegarEngine engine(out.transform->cfa, cegarOpts, session);
    Verdict verdict = engine.run();
    out.cegar = engine.stats();
    for (auto const & v : engine.stats().invariantViolations) {
        out.notes.push_back("invariant violation: " + v);
    }

    switch (verdict.kind) {
        case Verdict::Kind::Unknown:
            out.answer = SolveOutcome::Answer::Unknown;
            out.reason = verdict.reason;
            break;
        case Verdict::Kind::Unsafe: {
            out.path = verdict.path;
            Refutation refutation =
                config.direction == Direction::Forward
                    ? buildRefutation(system, *out.transform, *verdict.path)
                    : refutationFromBackwardPath(system, *out.transform, *verdict.path);
            RefutationCheck check = validateRefutation(system, refutation);
            if (!check.ok) {
                out.answer = SolveOutcome::Answer::Unknown;
                out.reason = "refutation validation failed: " + check.diagnostic;
                break;
            }
            out.answer = SolveOutcome::Answer::Unsat;
            out.refutation = std::move(refutation);
            out.validated = true;
            break;
        }
        case Verdict::Kind::Safe: {
            if (config.direction == Direction::Forward) {
                ModelDefs model = buildModel(system, *out.transform, config.domain, engine.precision(),
                                             engine.arg(), session);
                Tri valid = validateModel(system, model, session);
                if (valid == Tri::False) {
                    out.answer = SolveOutcome::Answer::Unknown;
                    out.reason = "model validation failed";
                    break;
                }
                out.answer = SolveOutcome::Answer::Sat;
                out.model = std::move(model);
                out.validated = valid == Tri::True;
                if (valid == Tri::Unknown) {
                    out.notes.push_back("model validation inconclusive (solver unknown)");
                }
            } else {
                // the backward encoding answers satisfiability only; the ARG
                // re-check above is the validation evidence
                out.answer = SolveOutcome::Answer::Sat;
                out.notes.push_back("backward direction: verdict only, no model synthesis");
                out.validated = engine.stats().invariantViolations.empty();
            }
            break;
        }
    }
    out.solver = session.stats();
    out.wallSeconds = monotonicSeconds() - t0;
    return out;
}

SolveOutcome solveFile(std::string const & path, RunConfig const & config) {
    SolveOutcome out;
    CHCSystem system;
    try {
        system = parseChcFile(path);
    } catch (FrontendError const & e) {
        out.answer = SolveOutcome::Answer::Error;
        out.reason = e.what();
        return out;
    }
    SolverOptions solverOpts;
    solverOpts.command = config.solverCommand.empty() ? defaultSolverCommand() : config.solverCommand;
    solverOpts.queryTimeoutMs = config.queryTimeoutMs;
    solverOpts.logScripts = config.logSmt;
    SolverSession session(solverOpts);
    return solveSystem(system, config, session);
}

} // namespace horncfa
