/**
 * DOM shell around AnnotationFlow: a task list on the left, the open entry
 * with per-sentence fact toggles in the middle, taxonomy toggles and
 * correctness controls on the right, live validation underneath. Everything
 * rendered from server data; the label tree is never hard-coded.
 */

import { WorkbenchApi } from './api.js';
import { DraftStore } from './drafts.js';
import { AnnotationFlow } from './flow.js';
import { CorrectnessNote, TaskSummary, TaxonomyNode } from './types.js';

export interface AppConfig {
  client: WorkbenchApi;
  drafts: DraftStore;
  annotatorId: string;
}

export class AnnotatorApp {
  readonly flow: AnnotationFlow;
  private root_: HTMLElement | null = null;
  private tasks: TaskSummary[] = [];

  constructor(private readonly config: AppConfig) {
    this.flow = new AnnotationFlow(config.client, config.drafts, config.annotatorId);
  }

  private get root(): HTMLElement {
    if (!this.root_) throw new Error('app not mounted');
    return this.root_;
  }

  async mount(root: HTMLElement): Promise<void> {
    this.root_ = root;
    root.innerHTML = `
      <header>
        <h1>mrcaudit annotator</h1>
        <span id="annotator-id"></span>
        <span id="progress-indicator"></span>
      </header>
      <div id="status-banner" hidden></div>
      <main>
        <nav id="task-list-pane"><h2>Tasks</h2><ul id="task-list"></ul></nav>
        <section id="entry-pane" hidden>
          <h2 id="entry-question"></h2>
          <p class="hint">Click a sentence to mark or unmark it as a supporting fact.</p>
          <div id="passages"></div>
        </section>
        <aside id="label-pane" hidden>
          <fieldset id="answer-type-fieldset"><legend>Answer type</legend></fieldset>
          <fieldset id="correctness-fieldset">
            <legend>Correctness</legend>
            <select id="correctness-verdict"><option value="">no issue</option></select>
            <select id="correctness-subreason"><option value="">no sub-reason</option></select>
            <textarea id="correctness-note" placeholder="note the alternative or correction"></textarea>
          </fieldset>
          <fieldset id="reasoning-fieldset"><legend>Reasoning</legend></fieldset>
          <fieldset id="knowledge-fieldset"><legend>Knowledge</legend></fieldset>
          <fieldset id="linguistic-fieldset"><legend>Linguistic complexity</legend></fieldset>
          <textarea id="record-notes" placeholder="free-text notes"></textarea>
          <div id="validation-panel"></div>
          <button id="submit-button" disabled>Submit</button>
        </aside>
      </main>`;
    this.byId<HTMLElement>('annotator-id').textContent = this.config.annotatorId;
    await this.flow.loadTaxonomy();
    this.renderLabelControls();
    this.wireStaticHandlers();
    await this.refreshTasks();
    await this.refreshProgress();
  }

  byId<T extends HTMLElement>(id: string): T {
    const element = this.root.querySelector(`#${id}`);
    if (!element) throw new Error(`missing element #${id}`);
    return element as T;
  }

  private banner(text: string | null): void {
    const banner = this.byId<HTMLElement>('status-banner');
    banner.hidden = text === null;
    banner.textContent = text ?? '';
  }

  async refreshTasks(): Promise<void> {
    this.tasks = await this.config.client.listTasks();
    const list = this.byId<HTMLUListElement>('task-list');
    list.innerHTML = '';
    for (const task of this.tasks) {
      const item = document.createElement('li');
      item.className = `task status-${task.status}`;
      item.dataset.entry = task.entry_id;
      item.textContent = `${task.entry_id} [${task.status}]`;
      item.addEventListener('click', () => void this.openTask(task.entry_id));
      list.appendChild(item);
    }
  }

  async refreshProgress(): Promise<void> {
    const progress = await this.config.client.progress();
    this.byId<HTMLElement>('progress-indicator').textContent =
      `${progress.by_status['submitted'] ?? 0} / ${progress.total} submitted`;
  }

  async openTask(entryId: string): Promise<void> {
    try {
      await this.flow.open(entryId);
    } catch (error) {
      this.banner(`could not open ${entryId}: ${error instanceof Error ? error.message : error}`);
      return;
    }
    this.banner(null);
    this.byId<HTMLElement>('entry-pane').hidden = false;
    this.byId<HTMLElement>('label-pane').hidden = false;
    this.renderEntry();
    this.syncControls();
  }

  private renderEntry(): void {
    const entry = this.flow.entry;
    if (!entry) return;
    this.byId<HTMLElement>('entry-question').textContent = entry.question;
    const container = this.byId<HTMLElement>('passages');
    container.innerHTML = '';
    entry.passages.forEach((passage, passageIndex) => {
      const block = document.createElement('div');
      block.className = 'passage';
      if (passage.title) {
        const title = document.createElement('h3');
        title.textContent = passage.title;
        block.appendChild(title);
      }
      passage.sentences.forEach(([start, end], sentenceIndex) => {
        const span = document.createElement('span');
        span.className = 'sentence';
        span.dataset.p = String(passageIndex);
        span.dataset.s = String(sentenceIndex);
        span.textContent = passage.text.slice(start, end);
        span.addEventListener('click', () => {
          if (this.flow.unanswerableSelected) return;
          this.flow.toggleFact(passageIndex, sentenceIndex);
          this.syncControls();
        });
        block.appendChild(span);
      });
      container.appendChild(block);
    });
  }

  private renderLabelControls(): void {
    const manifest = this.flow.manifest;
    if (!manifest) return;
    const families = new Map(manifest.taxonomy.map((node) => [node.name, node]));

    const answerFieldset = this.byId<HTMLFieldSetElement>('answer-type-fieldset');
    for (const leaf of families.get('AnswerType')?.children ?? []) {
      const label = document.createElement('label');
      const input = document.createElement('input');
      input.type = 'radio';
      input.name = 'answer-type';
      input.value = `AnswerType/${leaf.name}`;
      input.addEventListener('change', () => {
        this.flow.setAnswerType(input.value);
        this.syncControls();
      });
      label.appendChild(input);
      label.appendChild(document.createTextNode(leaf.name));
      label.title = leaf.description;
      answerFieldset.appendChild(label);
    }

    const verdictSelect = this.byId<HTMLSelectElement>('correctness-verdict');
    const subReasonSelect = this.byId<HTMLSelectElement>('correctness-subreason');
    const catalog = this.flow.catalog;
    if (catalog) {
      for (const verdict of catalog.verdicts) {
        const option = document.createElement('option');
        option.value = verdict;
        option.textContent = verdict.split('/').pop() ?? verdict;
        verdictSelect.appendChild(option);
      }
      for (const subReason of catalog.subReasons) {
        const option = document.createElement('option');
        option.value = subReason;
        option.textContent = subReason.split('/').pop() ?? subReason;
        subReasonSelect.appendChild(option);
      }
    }

    this.renderToggleTree('reasoning-fieldset', families.get('Reasoning'));
    this.renderToggleTree('knowledge-fieldset', families.get('Knowledge'));
    this.renderToggleTree('linguistic-fieldset', families.get('LinguisticComplexity'));
  }

  private renderToggleTree(fieldsetId: string, family: TaxonomyNode | undefined): void {
    if (!family) return;
    const fieldset = this.byId<HTMLFieldSetElement>(fieldsetId);
    const renderNode = (node: TaxonomyNode, path: string, container: HTMLElement) => {
      if (node.children.length === 0) {
        const label = document.createElement('label');
        const input = document.createElement('input');
        input.type = 'checkbox';
        input.dataset.label = path;
        input.addEventListener('change', () => {
          this.flow.toggleLabel(path);
          this.syncControls();
        });
        label.appendChild(input);
        label.appendChild(document.createTextNode(node.name));
        label.title = node.description;
        container.appendChild(label);
        return;
      }
      const group = document.createElement('div');
      group.className = 'label-group';
      const heading = document.createElement('strong');
      heading.textContent = node.name;
      heading.title = node.description;
      group.appendChild(heading);
      for (const child of node.children) renderNode(child, `${path}/${child.name}`, group);
      container.appendChild(group);
    };
    for (const child of family.children) renderNode(child, `${family.name}/${child.name}`, fieldset);
  }

  private wireStaticHandlers(): void {
    const verdictSelect = this.byId<HTMLSelectElement>('correctness-verdict');
    const subReasonSelect = this.byId<HTMLSelectElement>('correctness-subreason');
    const noteArea = this.byId<HTMLTextAreaElement>('correctness-note');
    const updateCorrectness = () => {
      const verdict = verdictSelect.value;
      const note: CorrectnessNote | null = verdict
        ? { verdict, sub_reason: subReasonSelect.value || null, note: noteArea.value }
        : null;
      this.flow.setCorrectness(note);
      this.syncControls();
    };
    verdictSelect.addEventListener('change', updateCorrectness);
    subReasonSelect.addEventListener('change', updateCorrectness);
    noteArea.addEventListener('input', updateCorrectness);

    this.byId<HTMLTextAreaElement>('record-notes').addEventListener('input', (event) => {
      this.flow.setNotes((event.target as HTMLTextAreaElement).value);
      this.syncControls();
    });

    this.byId<HTMLButtonElement>('submit-button').addEventListener('click', () => void this.submit());
  }

  async submit(): Promise<void> {
    const result = await this.flow.submit();
    if (result.kind === 'accepted') {
      this.banner(`submitted ${this.flow.record?.entry_id}`);
      await this.refreshTasks();
      await this.refreshProgress();
    } else if (result.kind === 'rejected') {
      this.banner(`server rejected the record: ${this.flow.lastServerMessage}`);
    } else if (result.kind === 'network-error') {
      this.banner(`network failure, draft kept locally: ${result.message}`);
    }
    this.syncControls();
  }

  /** Project flow state onto the controls. */
  syncControls(): void {
    const record = this.flow.record;
    if (!record) return;

    this.root.querySelectorAll<HTMLInputElement>('input[name="answer-type"]').forEach((input) => {
      input.checked = input.value === record.answer_type;
    });

    const unanswerable = this.flow.unanswerableSelected;
    const reasoningFieldset = this.byId<HTMLFieldSetElement>('reasoning-fieldset');
    reasoningFieldset.disabled = unanswerable;
    reasoningFieldset.classList.toggle('disabled', unanswerable);

    this.root.querySelectorAll<HTMLInputElement>('input[type="checkbox"][data-label]').forEach((input) => {
      input.checked = this.flow.hasLabel(input.dataset.label ?? '');
    });

    this.root.querySelectorAll<HTMLElement>('.sentence').forEach((span) => {
      const p = Number(span.dataset.p);
      const s = Number(span.dataset.s);
      span.classList.toggle('fact', this.flow.hasFact(p, s));
      span.classList.toggle('disabled', unanswerable);
    });

    const verdictSelect = this.byId<HTMLSelectElement>('correctness-verdict');
    const subReasonSelect = this.byId<HTMLSelectElement>('correctness-subreason');
    const noteArea = this.byId<HTMLTextAreaElement>('correctness-note');
    verdictSelect.value = record.correctness?.verdict ?? '';
    subReasonSelect.value = record.correctness?.sub_reason ?? '';
    if (noteArea.value !== (record.correctness?.note ?? '')) noteArea.value = record.correctness?.note ?? '';
    subReasonSelect.disabled = record.correctness === null;
    noteArea.disabled = record.correctness === null;

    const notes = this.byId<HTMLTextAreaElement>('record-notes');
    if (notes.value !== record.notes) notes.value = record.notes;

    const outcome = this.flow.outcome;
    const panel = this.byId<HTMLElement>('validation-panel');
    panel.innerHTML = '';
    if (outcome) {
      const list = document.createElement('ul');
      for (const finding of outcome.errors) {
        const item = document.createElement('li');
        item.className = 'error';
        item.textContent = `${finding.rule}: ${finding.message}`;
        list.appendChild(item);
      }
      for (const finding of outcome.warnings) {
        const item = document.createElement('li');
        item.className = 'warning';
        item.textContent = `${finding.rule}: ${finding.message}`;
        list.appendChild(item);
      }
      panel.appendChild(list);
      if (unanswerable) {
        const note = document.createElement('p');
        note.className = 'warning';
        note.id = 'unanswerable-hint';
        note.textContent = 'Unanswerable: reasoning and supporting facts are disabled and cleared.';
        panel.appendChild(note);
      }
    }

    this.byId<HTMLButtonElement>('submit-button').disabled = !this.flow.canSubmit;
  }
}
