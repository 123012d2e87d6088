/** Browser entry point: wires the pure view builders to the REST client and
 * the DOM. Holds no authoritative state — everything displayed comes from
 * the last server responses plus the local ViewState. */

import { ApiClient } from './api.js';
import { renderEmbedding } from './embedding.js';
import { buildHoverPreview } from './preview.js';
import { buildReportDrawer } from './drawer.js';
import { buildHypothesisPanel } from './panel.js';
import {
  initialViewState,
  togglePin,
  withActiveHypothesis,
  withFilter,
  withHighlight,
  withHover,
  withZoom,
  type ViewState,
} from './state.js';
import { drawerToHtml, embeddingToHtml, panelToHtml, previewToHtml } from './render.js';
import type { Concept, HypothesisInfo, LayoutResponse, Report, ValiditySummary } from './types.js';

export const LAYOUT_POLL_MS = 2000;

interface ServerData {
  layout: LayoutResponse;
  concepts: Map<string, Concept>;
  hypotheses: HypothesisInfo[];
  summary: ValiditySummary | null;
  attachedReports: Report[];
  relatedConceptsByReport: Record<string, string[]>;
  pinnedReports: Report[];
  hoveredReports: Report[];
}

export class App {
  private state: ViewState = initialViewState();
  private data: ServerData = {
    layout: { version: null, status: 'building', points: [] },
    concepts: new Map(),
    hypotheses: [],
    summary: null,
    attachedReports: [],
    relatedConceptsByReport: {},
    pinnedReports: [],
    hoveredReports: [],
  };

  constructor(
    private api: ApiClient,
    private root: HTMLElement,
  ) {}

  async start(): Promise<void> {
    await this.refreshAll();
    window.setInterval(() => void this.pollLayout(), LAYOUT_POLL_MS);
    this.root.addEventListener('click', (event) => void this.onClick(event));
    this.root.addEventListener('mouseover', (event) => void this.onHover(event));
    this.root.addEventListener('input', (event) => void this.onInput(event));
    this.root.addEventListener(
      'wheel',
      (event) => {
        event.preventDefault();
        this.state = withZoom(this.state, this.state.zoom * (event.deltaY < 0 ? 1.2 : 1 / 1.2));
        this.render();
      },
      { passive: false },
    );
  }

  private async pollLayout(): Promise<void> {
    const layout = await this.api.getLayout();
    if (layout.version !== this.data.layout.version || layout.status !== this.data.layout.status) {
      this.data.layout = layout;
      const concepts = await this.api.getConcepts();
      this.data.concepts = new Map(concepts.concepts.map((c) => [c.id, c]));
      this.render();
    }
  }

  private async refreshAll(): Promise<void> {
    const [layout, concepts, hypotheses] = await Promise.all([
      this.api.getLayout(),
      this.api.getConcepts(),
      this.api.listHypotheses(),
    ]);
    this.data.layout = layout;
    this.data.concepts = new Map(concepts.concepts.map((c) => [c.id, c]));
    this.data.hypotheses = hypotheses.hypotheses;
    await this.refreshHypothesis();
    this.render();
  }

  private async refreshHypothesis(): Promise<void> {
    const active = this.activeHypothesis();
    if (active === null) {
      this.data.summary = null;
      this.data.attachedReports = [];
      this.data.relatedConceptsByReport = {};
      return;
    }
    this.data.summary = await this.api.getSummary(active.id);
    const reports: Report[] = [];
    const related: Record<string, string[]> = {};
    for (const reportId of active.attached_report_ids) {
      const page = await this.api.getReports({ page_size: 500 });
      const report = page.items.find((r) => r.id === reportId);
      if (report) {
        reports.push(report);
        related[reportId] = (await this.api.relatedConcepts(active.id, reportId)).concept_ids;
      }
    }
    this.data.attachedReports = reports;
    this.data.relatedConceptsByReport = related;
  }

  private activeHypothesis(): HypothesisInfo | null {
    return this.data.hypotheses.find((h) => h.id === this.state.activeHypothesis) ?? null;
  }

  private async onClick(event: Event): Promise<void> {
    const target = event.target as HTMLElement;
    const mark = target.closest<HTMLElement>('.mark');
    if (mark?.dataset.concept) {
      this.state = togglePin(this.state, mark.dataset.concept);
      if (this.state.pinned) {
        const page = await this.api.getReports({ concept: this.state.pinned, page_size: 500 });
        this.data.pinnedReports = page.items;
      }
      this.render();
      return;
    }
    const attach = target.closest<HTMLElement>('button.attach:not([disabled])');
    const active = this.activeHypothesis();
    if (attach?.dataset.report && active) {
      await this.api.attachReport(active.id, attach.dataset.report);
      this.data.hypotheses = (await this.api.listHypotheses()).hypotheses;
      await this.refreshHypothesis();
      this.render();
      return;
    }
    if (target.closest('.new-hypothesis')) {
      const name = window.prompt('Hypothesis name');
      if (name) {
        const created = await this.api.createHypothesis(name);
        this.data.hypotheses = (await this.api.listHypotheses()).hypotheses;
        this.state = withActiveHypothesis(this.state, created.id);
        await this.refreshHypothesis();
        this.render();
      }
    }
  }

  private async onHover(event: Event): Promise<void> {
    const target = event.target as HTMLElement;
    const attached = target.closest<HTMLElement>('.attached-report');
    if (attached?.dataset.concepts !== undefined) {
      const ids = attached.dataset.concepts === '' ? [] : attached.dataset.concepts.split(',');
      this.state = withHighlight(this.state, ids);
      this.render();
      return;
    }
    const mark = target.closest<HTMLElement>('.mark');
    if (mark?.dataset.concept && mark.dataset.concept !== this.state.hovered) {
      this.state = withHover(this.state, mark.dataset.concept);
      const page = await this.api.getReports({ concept: mark.dataset.concept, page_size: 10 });
      this.data.hoveredReports = page.items;
      this.render();
    }
  }

  private onInput(event: Event): void {
    const target = event.target as HTMLInputElement;
    if (target.classList.contains('embedding-filter')) {
      this.state = withFilter(this.state, target.value);
      this.render();
    }
  }

  private render(): void {
    const viewport = { width: this.root.clientWidth || 1200, height: this.root.clientHeight || 800 };
    const embedding = renderEmbedding(this.data.layout, this.data.concepts, this.state, viewport);

    let preview = '';
    if (this.state.hovered) {
      const concept = this.data.concepts.get(this.state.hovered);
      if (concept) preview = previewToHtml(buildHoverPreview(concept, this.data.hoveredReports));
    }

    let drawer = '';
    if (this.state.pinned) {
      const concept = this.data.concepts.get(this.state.pinned);
      if (concept) {
        drawer = drawerToHtml(buildReportDrawer(concept, this.data.pinnedReports, this.activeHypothesis()));
      }
    }

    const panel = panelToHtml(
      buildHypothesisPanel(
        this.activeHypothesis(),
        this.data.hypotheses,
        this.data.summary,
        this.data.attachedReports,
        this.data.relatedConceptsByReport,
      ),
    );

    this.root.innerHTML =
      `<input class="embedding-filter" placeholder="filter concepts…" value="${this.state.filter}">` +
      `<main class="embedding-pane">${embeddingToHtml(embedding)}${preview}</main>` +
      `<aside class="drawer-pane">${drawer}</aside>` +
      `<aside class="panel-pane">${panel}</aside>`;
  }
}

export function bootstrap(): void {
  const root = document.getElementById('app');
  if (root) {
    void new App(new ApiClient(''), root).start();
  }
}
