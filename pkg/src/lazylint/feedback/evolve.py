"""Genetic feedback generation: plan, seed a population, select, cross over.

The LLM only ever proposes text.  Which candidates survive, which pairs breed,
and which answer is final is decided entirely by the deterministic fitness
function and a seeded RNG, so a recorded replay reproduces a run bit for bit.
"""

from __future__ import annotations

import ast
import json
import math
import random
from dataclasses import dataclass, field
from typing import Sequence

from ..corpus import IssueLabel, PlanContext
from ..gateway import ChatRequest, GatewayConfig, LlmGateway
from ..prompts import PromptSet
from .fitness import FitnessBreakdown, FitnessConfig, fitness
from .templates import Template

FITNESS_TIE_EPS = 1e-9

FALLBACK_PLAN = "Follow the template closely and quote the reviewer comment."
FALLBACK_EXPLANATION = "Planner output could not be parsed; template-only guidance."


class EvolutionError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class GaConfig:
    population_size: int = 10
    n_parents: int = 5
    tau: float = 0.1
    n_generations: int = 3
    seed: int = 0
    fitness: FitnessConfig = field(default_factory=FitnessConfig)

    def __post_init__(self) -> None:
        if self.population_size < 1:
            raise EvolutionError("population_size must be >= 1")
        if not 1 <= self.n_parents <= self.population_size:
            raise EvolutionError(
                f"n_parents must lie in [1, population_size]: {self.n_parents}")
        if self.n_parents < 2 and self.population_size > self.n_parents:
            raise EvolutionError("crossover needs at least 2 parents")
        if self.tau <= 0:
            raise EvolutionError(f"tau must be positive: {self.tau}")
        if self.n_generations < 0:
            raise EvolutionError(f"n_generations must be >= 0: {self.n_generations}")


@dataclass(frozen=True, slots=True)
class Plan:
    plan: str
    explanation: str
    fallback: bool = False

    def to_dict(self) -> dict:
        return {"plan": self.plan, "explanation": self.explanation,
                "fallback": self.fallback}


@dataclass(frozen=True, slots=True)
class Candidate:
    id: str
    text: str
    generation: int
    parent_ids: tuple[str, ...]
    fitness: FitnessBreakdown

    def to_dict(self) -> dict:
        return {"id": self.id, "text": self.text, "generation": self.generation,
                "parent_ids": list(self.parent_ids), "fitness": self.fitness.to_dict()}


@dataclass(slots=True)
class EvolutionResult:
    best: Candidate
    plan: Plan
    snapshots: list[list[Candidate]]  # initial population plus one per generation
    tie_applied: bool

    def to_dict(self) -> dict:
        return {
            "plan": self.plan.to_dict(),
            "generations": [
                {"index": i, "candidates": [c.to_dict() for c in snap]}
                for i, snap in enumerate(self.snapshots)
            ],
            "final": {"candidate": self.best.to_dict(), "tie_applied": self.tie_applied},
        }


def selection_probabilities(fits: Sequence[float], tau: float) -> list[float]:
    """Boltzmann softmax over fitness, stabilized by max subtraction."""
    if not fits:
        raise EvolutionError("no candidates to select from")
    if tau <= 0:
        raise EvolutionError(f"tau must be positive: {tau}")
    peak = max(fits)
    weights = [math.exp((f - peak) / tau) for f in fits]
    total = sum(weights)
    return [w / total for w in weights]


def select_parents(population: Sequence[Candidate], n_parents: int, tau: float,
                   rng: random.Random) -> list[Candidate]:
    """Sample without replacement by iterated softmax draws over the remainder."""
    if n_parents > len(population):
        raise EvolutionError(
            f"cannot select {n_parents} parents from {len(population)} candidates")
    pool = list(population)
    chosen: list[Candidate] = []
    for _ in range(n_parents):
        probs = selection_probabilities([c.fitness.total for c in pool], tau)
        draw = rng.random()
        acc = 0.0
        picked = len(pool) - 1  # numeric guard: draw == 1.0 cannot overrun
        for i, p in enumerate(probs):
            acc += p
            if draw < acc:
                picked = i
                break
        chosen.append(pool.pop(picked))
    return chosen


def _extract_json_value(response: str) -> object | None:
    start = min((i for i in (response.find("["), response.find("{")) if i != -1),
                default=-1)
    if start == -1:
        return None
    opener = response[start]
    closer = "]" if opener == "[" else "}"
    depth = 0
    in_string = False
    escaped = False
    for i in range(start, len(response)):
        ch = response[i]
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == opener:
            depth += 1
        elif ch == closer:
            depth -= 1
            if depth == 0:
                snippet = response[start:i + 1]
                for parser in (json.loads, ast.literal_eval):
                    try:
                        return parser(snippet)
                    except (ValueError, SyntaxError):
                        continue
                return None
    return None


def parse_plan(response: str) -> Plan | None:
    """First well-formed {plan, explanation} object in the first JSON value."""
    value = _extract_json_value(response)
    if isinstance(value, dict):
        value = [value]
    if not isinstance(value, list):
        return None
    for item in value:
        if (isinstance(item, dict) and isinstance(item.get("plan"), str)
                and item["plan"].strip()):
            return Plan(plan=item["plan"].strip(),
                        explanation=str(item.get("explanation", "")).strip())
    return None


def plan_request(segment_text: str, label: IssueLabel, context: PlanContext,
                 prompts: PromptSet, config: GatewayConfig,
                 attempt: int = 0) -> ChatRequest:
    body = prompts.render(
        "planner",
        review=segment_text,
        issue=label.display,
        abstract=context.abstract,
        summary=context.reviewer_summary,
        strengths=context.reviewer_strengths,
    )
    if attempt > 0:
        body += ("\n\nRetry: the previous output was not a JSON list of "
                 "{\"plan\", \"explanation\"} objects. Return only the JSON list.")
    return config.request(body)


def generate_plan(segment_text: str, label: IssueLabel, context: PlanContext,
                  gateway: LlmGateway, prompts: PromptSet,
                  config: GatewayConfig) -> Plan:
    for attempt in (0, 1):
        response = gateway.complete(
            plan_request(segment_text, label, context, prompts, config, attempt))
        plan = parse_plan(response.content)
        if plan is not None:
            return plan
    return Plan(plan=FALLBACK_PLAN, explanation=FALLBACK_EXPLANATION, fallback=True)


def candidate_request(segment_text: str, label: IssueLabel, template: Template,
                      plan: Plan, index: int, total: int, prompts: PromptSet,
                      config: GatewayConfig) -> ChatRequest:
    body = prompts.render(
        "feedback_generation",
        weakness=segment_text,
        issue=label.display,
        template=template.body,
        plan=plan.plan,
        explanation=plan.explanation,
        index=str(index),
        total=str(total),
    )
    return config.request(body)


def crossover_request(segment_text: str, label: IssueLabel,
                      parents: Sequence[Candidate], prompts: PromptSet,
                      config: GatewayConfig) -> ChatRequest:
    listing = "\n".join(f"{i + 1}) {c.text}" for i, c in enumerate(parents))
    body = prompts.render("crossover", weakness=segment_text, issue=label.display,
                          parents=listing)
    return config.request(body)


def _score(text: str, template: Template, config: GaConfig) -> FitnessBreakdown:
    return fitness(text, template.body, config.fitness)


def run_evolution(segment_text: str, label: IssueLabel, template: Template,
                  context: PlanContext, gateway: LlmGateway, prompts: PromptSet,
                  gw_config: GatewayConfig,
                  ga_config: GaConfig | None = None) -> EvolutionResult:
    cfg = ga_config or GaConfig()
    rng = random.Random(cfg.seed)

    plan = generate_plan(segment_text, label, context, gateway, prompts, gw_config)

    init_requests = [
        candidate_request(segment_text, label, template, plan, i + 1,
                          cfg.population_size, prompts, gw_config)
        for i in range(cfg.population_size)
    ]
    population = [
        Candidate(id=f"g0-c{i}", text=resp.content.strip(), generation=0,
                  parent_ids=(), fitness=_score(resp.content.strip(), template, cfg))
        for i, resp in enumerate(gateway.complete_many(init_requests))
    ]
    pool: list[Candidate] = list(population)
    snapshots: list[list[Candidate]] = [list(population)]

    for gen in range(1, cfg.n_generations + 1):
        parents = select_parents(population, cfg.n_parents, cfg.tau, rng)
        n_offspring = cfg.population_size - cfg.n_parents
        pairs = [rng.sample(parents, 2) for _ in range(n_offspring)]
        requests = [
            crossover_request(segment_text, label, pair, prompts, gw_config)
            for pair in pairs
        ]
        offspring = []
        for i, (pair, resp) in enumerate(zip(pairs, gateway.complete_many(requests))):
            text = resp.content.strip()
            offspring.append(Candidate(
                id=f"g{gen}-c{i}",
                text=text,
                generation=1 + max(p.generation for p in pair),
                parent_ids=tuple(p.id for p in pair),
                fitness=_score(text, template, cfg),
            ))
        population = parents + offspring
        pool.extend(offspring)
        snapshots.append(list(population))

    best_total = max(c.fitness.total for c in pool)
    leaders = [c for c in pool if best_total - c.fitness.total <= FITNESS_TIE_EPS]
    tie_applied = False
    if len(leaders) > 1:
        # deadlocked leaders: synthesize one more child from all of them
        resp = gateway.complete(
            crossover_request(segment_text, label, leaders, prompts, gw_config))
        text = resp.content.strip()
        best = Candidate(
            id="tie-child",
            text=text,
            generation=1 + max(c.generation for c in leaders),
            parent_ids=tuple(c.id for c in leaders),
            fitness=_score(text, template, cfg),
        )
        tie_applied = True
    else:
        best = leaders[0]
    return EvolutionResult(best=best, plan=plan, snapshots=snapshots,
                           tie_applied=tie_applied)
