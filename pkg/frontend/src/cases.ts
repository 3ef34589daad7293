// "My cases": live progress for reports this victim filed — state, ballot
// counts (never verifier identities), deadline, and the event history.

import { ApiClient, ProgressView } from './api.js';
import { clear, el } from './dom.js';

export function renderMyCases(doc: Document, api: ApiClient): {
  root: HTMLElement;
  track: (caseId: string) => void;
  refresh: () => Promise<void>;
} {
  const root = el(doc, 'section', { class: 'my-cases' });
  root.append(el(doc, 'h2', {}, ['My cases']));
  const list = el(doc, 'div', { class: 'case-list' });
  root.append(list);
  const tracked: string[] = [];

  function renderProgress(progress: ProgressView): HTMLElement {
    const card = el(doc, 'article', { class: 'case-card', 'data-case': progress.case_id });
    card.append(
      el(doc, 'h3', {}, [`Case ${progress.case_id}`]),
      el(doc, 'p', { class: 'state' }, [progress.state]),
      el(doc, 'p', { class: 'ballots' }, [
        `Ballots ${progress.ballots_received}/${progress.ballots_expected}`,
      ]),
    );
    if (progress.deadline) {
      card.append(el(doc, 'p', { class: 'deadline' }, [`Verification deadline ${progress.deadline}`]));
    }
    const history = el(doc, 'ol', { class: 'events' });
    for (const event of progress.events) {
      history.append(el(doc, 'li', {}, [`${event.at} ${event.kind}`]));
    }
    card.append(history);
    return card;
  }

  async function refresh(): Promise<void> {
    clear(list);
    for (const caseId of tracked) {
      list.append(renderProgress(await api.getProgress(caseId)));
    }
  }

  return {
    root,
    track: (caseId: string) => {
      if (!tracked.includes(caseId)) tracked.push(caseId);
    },
    refresh,
  };
}
