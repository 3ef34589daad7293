// Report wizard: pick one of the six abuse categories, attach at least one
// post as evidence, file, and show the signed acknowledgement + escrowed fee.

import { ApiClient, ApiError, FiledReport } from './api.js';
import { clear, el } from './dom.js';

export const ABUSE_CATEGORIES = [
  'Threat',
  'AbusiveMessage',
  'Doxxing',
  'Blackmail',
  'Harassment',
  'HateSpeech',
] as const;

export interface WizardHooks {
  onFiled?: (filed: FiledReport) => void;
  // lets tests tick the retry countdown without real timers
  intervalMs?: number;
}

export function renderReportWizard(
  doc: Document,
  api: ApiClient,
  hooks: WizardHooks = {},
): HTMLElement {
  const root = el(doc, 'section', { class: 'report-wizard' });
  root.append(el(doc, 'h2', {}, ['Report abuse']));

  const accused = el(doc, 'input', { name: 'accused', placeholder: 'account id of the abuser' });
  const category = el(doc, 'select', { name: 'category' });
  for (const name of ABUSE_CATEGORIES) {
    category.append(el(doc, 'option', { value: name }, [name]));
  }
  const narrative = el(doc, 'textarea', { name: 'narrative', placeholder: 'what happened' });

  const evidenceList = el(doc, 'ul', { class: 'evidence-list' });
  const evidenceInput = el(doc, 'input', { name: 'evidence', placeholder: 'post id' });
  const addEvidence = el(doc, 'button', { type: 'button' }, ['Attach post']);
  const evidence: string[] = [];
  addEvidence.addEventListener('click', () => {
    const postId = evidenceInput.value.trim();
    if (!postId) return;
    evidence.push(postId);
    evidenceList.append(el(doc, 'li', {}, [postId]));
    evidenceInput.value = '';
    feedback.textContent = '';
  });

  const submit = el(doc, 'button', { type: 'button', class: 'submit' }, ['File report']);
  const feedback = el(doc, 'p', { class: 'feedback' });
  const result = el(doc, 'div', { class: 'result' });

  let inFlight = false;
  submit.addEventListener('click', async () => {
    if (inFlight) return;
    if (evidence.length === 0) {
      feedback.textContent = 'A report must cite at least one post.';
      return;
    }
    inFlight = true;
    submit.setAttribute('disabled', 'disabled');
    feedback.textContent = '';
    try {
      const filed = await api.fileReport({
        accused: accused.value.trim(),
        category: category.value,
        narrative: narrative.value,
        evidence: [...evidence],
      });
      clear(result);
      result.append(
        el(doc, 'h3', {}, ['Report filed']),
        el(doc, 'p', { class: 'case-id' }, [`Case ${filed.case.case_id}`]),
        el(doc, 'p', { class: 'ack-digest' }, [
          `Acknowledgement digest ${filed.acknowledgement.body.report_digest.slice(0, 16)}…`,
        ]),
        el(doc, 'p', { class: 'fee-held' }, [`Fee held in escrow: ${filed.fee_held}`]),
      );
      hooks.onFiled?.(filed);
    } catch (error) {
      if (error instanceof ApiError && error.status === 429) {
        startRetryCountdown(error.retryAfterSeconds ?? 60);
      } else if (error instanceof ApiError) {
        feedback.textContent = `${error.code}: ${error.detail}`;
      } else {
        feedback.textContent = String(error);
      }
    } finally {
      inFlight = false;
      submit.removeAttribute('disabled');
    }
  });

  let retryTimer: ReturnType<typeof setInterval> | undefined;
  function startRetryCountdown(seconds: number): void {
    let remaining = Math.ceil(seconds);
    feedback.textContent = `Filing limit reached. Retry in ${remaining}s.`;
    if (retryTimer) clearInterval(retryTimer);
    retryTimer = setInterval(() => {
      remaining -= 1;
      if (remaining <= 0) {
        clearInterval(retryTimer);
        feedback.textContent = 'You can file again now.';
      } else {
        feedback.textContent = `Filing limit reached. Retry in ${remaining}s.`;
      }
    }, hooks.intervalMs ?? 1000);
  }

  root.append(
    el(doc, 'label', {}, ['Accused account', accused]),
    el(doc, 'label', {}, ['Category', category]),
    el(doc, 'label', {}, ['Narrative', narrative]),
    el(doc, 'label', {}, ['Evidence posts', evidenceInput]),
    addEvidence,
    evidenceList,
    submit,
    feedback,
    result,
  );
  return root;
}
