// Verifier ballot queue: anonymized case views with deadline countdowns.
// Submitting removes the item; double submission is blocked client-side and
// rejected server-side anyway; expired items render disabled.

import { ApiClient, ApiError, QueueItem } from './api.js';
import { clear, countdownText, el } from './dom.js';

export interface QueueHooks {
  onSubmitted?: (caseId: string) => void;
  now?: () => Date;
}

export function renderBallotQueue(doc: Document, api: ApiClient, hooks: QueueHooks = {}): {
  root: HTMLElement;
  refresh: () => Promise<void>;
} {
  const root = el(doc, 'section', { class: 'ballot-queue' });
  const heading = el(doc, 'h2', {}, ['Ballot queue']);
  const counter = el(doc, 'p', { class: 'queue-count' }, ['0 items']);
  const list = el(doc, 'div', { class: 'queue-items' });
  root.append(heading, counter, list);

  function renderItem(item: QueueItem): HTMLElement {
    const card = el(doc, 'article', { class: 'queue-item', 'data-case': item.case_id });
    const now = hooks.now?.() ?? new Date();
    const expired = new Date(item.deadline).getTime() <= now.getTime();

    card.append(
      el(doc, 'h3', {}, [`Case ${item.case_id}`]),
      el(doc, 'p', { class: 'category' }, [`Claimed category: ${item.category}`]),
      el(doc, 'blockquote', { class: 'narrative' }, [item.redacted_narrative]),
    );
    for (const text of item.redacted_evidence) {
      card.append(el(doc, 'blockquote', { class: 'evidence' }, [text]));
    }
    card.append(el(doc, 'p', { class: 'deadline' }, [countdownText(item.deadline, now)]));

    const verdict = el(doc, 'select', { class: 'verdict' });
    verdict.append(el(doc, 'option', { value: 'abuse' }, ['This is abuse']));
    verdict.append(el(doc, 'option', { value: 'not-abuse' }, ['Not abuse']));
    const impact = el(doc, 'select', { class: 'impact' });
    for (let score = 1; score <= 5; score++) {
      impact.append(el(doc, 'option', { value: String(score) }, [String(score)]));
    }
    const badFaith = el(doc, 'input', { type: 'checkbox', class: 'bad-faith' });
    const submit = el(doc, 'button', { type: 'button', class: 'submit' }, ['Submit ballot']);
    const feedback = el(doc, 'p', { class: 'feedback' });

    if (expired) {
      submit.setAttribute('disabled', 'disabled');
      feedback.textContent = 'deadline passed';
    }

    let submitted = false;
    submit.addEventListener('click', async () => {
      if (submitted || expired) return;
      submitted = true; // double-click guard; server rejects duplicates too
      submit.setAttribute('disabled', 'disabled');
      try {
        await api.submitBallot(item.case_id, {
          verdict: verdict.value === 'abuse',
          impact: Number(impact.value),
          bad_faith: badFaith.checked,
        });
        card.remove();
        bumpCounter(-1);
        hooks.onSubmitted?.(item.case_id);
      } catch (error) {
        if (error instanceof ApiError && error.status === 410) {
          feedback.textContent = 'deadline passed';
        } else {
          feedback.textContent = String(error);
          submitted = false;
          submit.removeAttribute('disabled');
        }
      }
    });

    card.append(
      el(doc, 'label', {}, ['Verdict ', verdict]),
      el(doc, 'label', {}, ['Impact ', impact]),
      el(doc, 'label', {}, ['Reporter acting in bad faith ', badFaith]),
      submit,
      feedback,
    );
    return card;
  }

  let count = 0;
  function bumpCounter(delta: number): void {
    count += delta;
    counter.textContent = `${count} item${count === 1 ? '' : 's'}`;
  }

  async function refresh(): Promise<void> {
    const { items } = await api.getQueue();
    clear(list);
    count = 0;
    for (const item of items) {
      list.append(renderItem(item));
    }
    bumpCounter(items.length);
  }

  return { root, refresh };
}
