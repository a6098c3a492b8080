/**
 * Client-side mirror of the service's record validation.
 *
 * Rule identifiers and trigger conditions follow the machine-readable
 * manifest served by GET /taxonomy. The server stays authoritative: this
 * exists so the form can refuse a record the server would reject before the
 * annotator hits submit. A shared fixture corpus pins both validators to
 * the same verdicts.
 */

import {
  FactRef,
  Finding,
  Rule,
  TaxonomyManifest,
  TaxonomyNode,
  ValidationOutcome,
  WireEntry,
  WireRecord,
} from './types.js';

export const RULES = {
  entryId: 'structure.entry_id',
  unknownLabel: 'label.unknown',
  notLeaf: 'label.not_leaf',
  wrongFamily: 'label.family',
  answerTypeMissing: 'answer_type.missing',
  danglingFact: 'facts.dangling',
  unanswerableReasoning: 'unanswerable.reasoning',
  unanswerableFacts: 'unanswerable.facts',
  noteMissing: 'correctness.note_missing',
  badSubReason: 'correctness.sub_reason',
  retrievalOverlap: 'reasoning.retrieval_overlap',
} as const;

const FALLBACK = {
  unanswerable: 'AnswerType/Unanswerable',
  retrieval: 'Reasoning/Retrieval',
  abstractGroups: ['Operational', 'Arithmetic'],
  verdicts: ['Correctness/Debatable', 'Correctness/Wrong'],
  subReasons: [
    'Correctness/AnswerPresent',
    'Correctness/ArbitraryPrecision',
    'Correctness/ArbitrarySelection',
    'Correctness/ConjunctionOrIsolated',
    'Correctness/Other',
  ],
};

export class Catalog {
  private nodes = new Map<string, { leaf: boolean }>();
  readonly unanswerable: string;
  readonly retrieval: string;
  readonly abstractGroups: string[];
  readonly verdicts: string[];
  readonly subReasons: string[];

  constructor(manifest: TaxonomyManifest) {
    const walk = (node: TaxonomyNode, prefix: string) => {
      const path = prefix ? `${prefix}/${node.name}` : node.name;
      this.nodes.set(path, { leaf: node.children.length === 0 });
      for (const child of node.children) walk(child, path);
    };
    for (const root of manifest.taxonomy) walk(root, '');

    const param = (ruleId: string, key: string): unknown => {
      const rule = manifest.rules.find((r: Rule) => r.id === ruleId);
      return rule?.params ? rule.params[key] : undefined;
    };
    this.unanswerable = (param(RULES.unanswerableReasoning, 'answer_type') as string) ?? FALLBACK.unanswerable;
    this.retrieval = (param(RULES.retrievalOverlap, 'retrieval') as string) ?? FALLBACK.retrieval;
    this.abstractGroups = (param(RULES.retrievalOverlap, 'groups') as string[]) ?? FALLBACK.abstractGroups;
    this.verdicts = (param(RULES.noteMissing, 'verdicts') as string[]) ?? FALLBACK.verdicts;
    this.subReasons = (param(RULES.badSubReason, 'sub_reasons') as string[]) ?? FALLBACK.subReasons;
  }

  contains(path: string): boolean {
    return this.nodes.has(path);
  }

  isLeaf(path: string): boolean {
    return this.nodes.get(path)?.leaf === true;
  }
}

function checkLabel(catalog: Catalog, label: string, family: string, errors: Finding[]): void {
  if (!catalog.contains(label)) {
    errors.push({ rule: RULES.unknownLabel, message: `${label} is not in the taxonomy`, subject: label });
  } else if (!catalog.isLeaf(label)) {
    errors.push({ rule: RULES.notLeaf, message: `${label} is a grouping node, not a leaf`, subject: label });
  } else if (label.split('/')[0] !== family) {
    errors.push({ rule: RULES.wrongFamily, message: `${label} does not belong to ${family}`, subject: label });
  }
}

function hasSentence(entry: WireEntry, ref: FactRef): boolean {
  const [p, s] = ref;
  return p >= 0 && p < entry.passages.length && s >= 0 && s < entry.passages[p].sentences.length;
}

function checkRefs(entry: WireEntry, refs: FactRef[], context: string, errors: Finding[]): void {
  for (const ref of refs) {
    if (!hasSentence(entry, ref)) {
      errors.push({
        rule: RULES.danglingFact,
        message: `${context} reference (${ref[0]}, ${ref[1]}) does not resolve to a sentence`,
        subject: `(${ref[0]}, ${ref[1]})`,
      });
    }
  }
}

export function validateRecord(record: WireRecord, entry: WireEntry, catalog: Catalog): ValidationOutcome {
  const errors: Finding[] = [];
  const warnings: Finding[] = [];

  if (!record.entry_id) {
    errors.push({ rule: RULES.entryId, message: 'record has no entry_id', subject: 'entry_id' });
  }

  if (record.answer_type === null || record.answer_type === '') {
    errors.push({ rule: RULES.answerTypeMissing, message: 'pick an answer type', subject: 'answer_type' });
  } else {
    checkLabel(catalog, record.answer_type, 'AnswerType', errors);
  }

  for (const label of record.reasoning) checkLabel(catalog, label, 'Reasoning', errors);
  for (const label of record.knowledge) checkLabel(catalog, label, 'Knowledge', errors);
  for (const mark of record.linguistic) {
    checkLabel(catalog, mark.label, 'LinguisticComplexity', errors);
    checkRefs(entry, mark.sentences, mark.label, errors);
  }

  if (record.correctness !== null) {
    if (!catalog.verdicts.includes(record.correctness.verdict)) {
      errors.push({
        rule: RULES.wrongFamily,
        message: `correctness verdict must be one of ${catalog.verdicts.join(', ')}`,
        subject: record.correctness.verdict,
      });
    }
    if (record.correctness.sub_reason !== null && !catalog.subReasons.includes(record.correctness.sub_reason)) {
      errors.push({
        rule: RULES.badSubReason,
        message: `unknown correctness sub-reason ${record.correctness.sub_reason}`,
        subject: record.correctness.sub_reason,
      });
    }
    if (record.correctness.note.trim() === '') {
      errors.push({
        rule: RULES.noteMissing,
        message: 'Debatable/Wrong needs a note describing the alternative or correction',
        subject: record.correctness.verdict,
      });
    }
  }

  checkRefs(entry, record.supporting_facts, 'supporting fact', errors);

  if (record.answer_type === catalog.unanswerable) {
    if (record.reasoning.length > 0) {
      errors.push({
        rule: RULES.unanswerableReasoning,
        message: 'reasoning labels are not allowed on an unanswerable record',
        subject: record.reasoning.join(', '),
      });
    }
    if (record.supporting_facts.length > 0) {
      errors.push({
        rule: RULES.unanswerableFacts,
        message: 'supporting facts are not allowed on an unanswerable record',
        subject: `${record.supporting_facts.length} refs`,
      });
    }
  }

  if (record.reasoning.includes(catalog.retrieval)) {
    const abstract = record.reasoning.filter((label) => {
      const parts = label.split('/');
      return parts.length >= 2 && catalog.abstractGroups.includes(parts[1]);
    });
    if (abstract.length > 0) {
      warnings.push({
        rule: RULES.retrievalOverlap,
        message: 'Retrieval alongside abstract reasoning labels is suspicious',
        subject: abstract.sort().join(', '),
      });
    }
  }

  return { ok: errors.length === 0, errors, warnings };
}
