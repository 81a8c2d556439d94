#ifndef MLN_PARSER_HPP
#define MLN_PARSER_HPP

#include <string>
#include <vector>

#include "mln/evidence.hpp"
#include "mln/logic.hpp"

namespace mln {

/// Parses a knowledge base document.
///
/// Grammar (line oriented, // comments):
///   zoneType = { SKY, VERTICAL, HORIZONTAL }     domain enumeration
///   *appearI(agent, zone)                        closed-world declaration
///   entryExitZone(zone)                          open (query) declaration
///   2.0 appearI(a,z) => entryExitZone(z)         soft rule (leading weight)
///   zoneBuildingEntExit(z) => zoneClass(z,VERTICAL).   hard rule (period)
///
/// Connectives: => ^ v !  plus a leading "EXIST x,y" prefix. Constants begin
/// with an uppercase letter or digit, variables with a lowercase letter.
/// Rules are clausified on the fly; a multi-clause CNF splits its weight
/// equally across the clauses.
KnowledgeBase parseKb(const std::string& text);

/// Evidence lines: "P(A,B)" (true), "!P(A,B)" (false), "0.73 P(A,B)" (soft).
EvidenceSet parseEvidence(const std::string& text, const KnowledgeBase& kb);

/// Query lines: a bare predicate name (all groundings) or an atom whose
/// lowercase arguments act as wildcards.
QuerySpec parseQuery(const std::string& text, const KnowledgeBase& kb);

/// Canonical text form; parseKb(prettyPrint(kb)) reproduces kb (schemas,
/// clause sets, weights to 1e-9).
std::string prettyPrint(const KnowledgeBase& kb);

/// Structural equality used by round-trip checks.
bool structurallyEqual(const KnowledgeBase& a, const KnowledgeBase& b,
                       double weightTol = 1e-9);

/// Replaces soft-formula weights from a weights file (index, weight, source
/// text per line, tab separated). Hard formulas keep their status.
void applyWeightsFile(KnowledgeBase& kb, const std::string& text);

/// Serializes the formula weights in the applyWeightsFile format.
std::string weightsToText(const KnowledgeBase& kb);

}  // namespace mln

#endif
