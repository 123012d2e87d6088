/** HTML renderers for the view models. String-based so the view layer stays
 * a pure, snapshot-testable function of its inputs. */

import type { EmbeddingView } from './embedding.js';
import type { PreviewBox, InstanceOverlay } from './preview.js';
import type { ReportDrawer } from './drawer.js';
import type { EmptyPanel, HypothesisPanel, PercentBar } from './panel.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function embeddingToHtml(view: EmbeddingView): string {
  if (view.kind === 'empty') {
    return `<div class="embedding-empty">${escapeHtml(view.message)}</div>`;
  }
  const spans = view.marks.map((mark) => {
    const classes = ['mark'];
    if (mark.emphasized) classes.push('mark-emphasized');
    if (mark.dimmed) classes.push('mark-dimmed');
    const style =
      `left:${mark.x.toFixed(1)}px;top:${mark.y.toFixed(1)}px;` +
      `font-size:${mark.fontSize.toFixed(2)}px;opacity:${mark.opacity.toFixed(3)}`;
    return (
      `<span class="${classes.join(' ')}" data-concept="${mark.conceptId}" style="${style}">` +
      `${escapeHtml(mark.phrase)}</span>`
    );
  });
  return `<div class="embedding">${spans.join('')}</div>`;
}

export function previewToHtml(box: PreviewBox): string {
  if (box.emptyMessage !== null) {
    return (
      `<div class="preview" data-concept="${box.conceptId}">` +
      `<h4>${escapeHtml(box.phrase)}</h4>` +
      `<p class="preview-empty">${escapeHtml(box.emptyMessage)}</p></div>`
    );
  }
  const thumbs = box.thumbnails
    .map((t) => `<img class="thumb" data-instance="${t.instanceId}" src="${t.url}" alt="instance">`)
    .join('');
  const excerpts = box.excerpts.map((e) => `<li>${escapeHtml(e)}</li>`).join('');
  return (
    `<div class="preview" data-concept="${box.conceptId}">` +
    `<h4>${escapeHtml(box.phrase)}</h4>` +
    `<p class="preview-counts">${box.reportCount} reports · ${box.mentionCount} mentions</p>` +
    `<div class="preview-thumbs">${thumbs}</div>` +
    `<ul class="preview-excerpts">${excerpts}</ul></div>`
  );
}

export function overlayToHtml(overlay: InstanceOverlay): string {
  return (
    `<div class="instance-overlay">` +
    `<img src="${overlay.url}" alt="instance">` +
    `<p class="overlay-prediction">${escapeHtml(overlay.modelOutput)}</p></div>`
  );
}

export function drawerToHtml(drawer: ReportDrawer): string {
  const rows = drawer.rows
    .map((row) => {
      const button = row.canAttach
        ? `<button class="attach" data-report="${row.reportId}">add to hypothesis</button>`
        : `<button class="attach" disabled title="${escapeHtml(row.disabledReason ?? '')}">` +
          `${row.attached ? 'attached' : 'add to hypothesis'}</button>`;
      return (
        `<li class="drawer-row${row.attached ? ' attached' : ''}" data-report="${row.reportId}">` +
        `<img class="thumb" src="${row.instanceUrl}" alt="instance">` +
        `<p>${escapeHtml(row.text)}</p>` +
        `<p class="model-output">model: ${escapeHtml(row.modelOutput)}</p>` +
        button +
        `</li>`
      );
    })
    .join('');
  return (
    `<div class="drawer" data-concept="${drawer.conceptId}">` +
    `<h3>${escapeHtml(drawer.phrase)} (${drawer.rows.length})</h3><ul>${rows}</ul></div>`
  );
}

function barToHtml(bar: PercentBar, title: string): string {
  const width = bar.fraction === null ? 0 : Math.round(bar.fraction * 100);
  return (
    `<section class="validation"><h4>${escapeHtml(title)}</h4>` +
    `<div class="bar"><div class="bar-fill" style="width:${width}%"></div>` +
    `<span class="bar-label">${escapeHtml(bar.label)}</span></div>` +
    `<p class="bar-counts">${bar.positive} / ${bar.negative} / ${bar.unlabeled} unlabeled</p></section>`
  );
}

export function panelToHtml(panel: HypothesisPanel | EmptyPanel): string {
  const options = panel.switcher
    .map((h) => `<option value="${h.id}">${escapeHtml(h.name)}</option>`)
    .join('');
  const switcher =
    `<select class="hypothesis-switcher">${options}</select>` +
    `<button class="new-hypothesis">new hypothesis</button>`;
  if (panel.kind === 'empty') {
    return `<div class="panel">${switcher}<p>${escapeHtml(panel.message)}</p></div>`;
  }
  const reports = panel.attachedReports
    .map(
      (row) =>
        `<li class="attached-report" data-report="${row.report.id}" ` +
        `data-concepts="${row.relatedConceptIds.join(',')}">${escapeHtml(row.report.text)}</li>`,
    )
    .join('');
  return (
    `<div class="panel" data-hypothesis="${panel.hypothesisId}">` +
    switcher +
    `<input class="name-editor" value="${escapeHtml(panel.name)}">` +
    `<ul class="attached-reports">${reports}</ul>` +
    barToHtml(panel.additionalBar, 'Additional instances') +
    barToHtml(panel.modifiedBar, 'Modified instances') +
    `<input class="image-search" placeholder="search images…">` +
    `</div>`
  );
}
