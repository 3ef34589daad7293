// Scripted UI tests against the live Python gateway: the report wizard, the
// verifier ballot queue (with a DOM leak check against the unredacted
// fixture case), and the certificate checker with a tampered upload.

import { JSDOM } from 'jsdom';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { mountConsole } from '../src/app.js';
import { renderCertificateChecker } from '../src/certificate.js';
import { renderBallotQueue } from '../src/queue.js';
import { renderReportWizard } from '../src/wizard.js';
import { Service, startService, until } from './harness.js';

let service: Service;

beforeAll(async () => {
  service = await startService();
}, 30_000);

afterAll(() => {
  service?.stop();
});

function newDocument(): Document {
  return new JSDOM('<div id="app"></div>').window.document;
}

function api(token: string): ApiClient {
  return new ApiClient(service.baseUrl, token);
}

function setValue(element: Element | null, value: string): void {
  (element as HTMLInputElement).value = value;
}

const VERIFIER_TOKENS = ['tok-v1', 'tok-v2', 'tok-v3', 'tok-v4', 'tok-v5'];

async function verifierWithQueueItem(caseId: string): Promise<string> {
  for (const token of VERIFIER_TOKENS) {
    const { items } = await api(token).getQueue();
    if (items.some((item) => item.case_id === caseId)) {
      return token;
    }
  }
  throw new Error(`no verifier holds an open assignment for ${caseId}`);
}

async function settleCase(reporterToken: string, caseId: string): Promise<string | null> {
  // three assigned verifiers vote "abuse" through the API
  for (let ballots = 0; ballots < 3; ballots++) {
    const token = await verifierWithQueueItem(caseId);
    await api(token).submitBallot(caseId, { verdict: true, impact: 4, bad_faith: false });
  }
  const progress = await api(reporterToken).getProgress(caseId);
  expect(progress.state).toBe('Settled');
  const admin = api('tok-admin');
  const exported = await admin.getCase(caseId);
  return exported.certificate_id;
}

describe('report wizard', () => {
  it('files a report and shows the acknowledgement digest and escrowed fee', async () => {
    const doc = newDocument();
    const wizard = renderReportWizard(doc, api('tok-alice'));
    doc.body.append(wizard);

    setValue(wizard.querySelector('input[name="accused"]'), 'mallory');
    setValue(wizard.querySelector('select[name="category"]'), 'Harassment');
    setValue(wizard.querySelector('textarea[name="narrative"]'), '@mallory will not stop');
    setValue(wizard.querySelector('input[name="evidence"]'), 'post-1');
    (wizard.querySelectorAll('button')[0] as HTMLButtonElement).click(); // attach
    (wizard.querySelector('button.submit') as HTMLButtonElement).click();

    await until(() => wizard.querySelector('.ack-digest') !== null, 5000, 'ack digest');
    expect(wizard.querySelector('.ack-digest')!.textContent).toMatch(
      /Acknowledgement digest [0-9a-f]{16}…/,
    );
    expect(wizard.querySelector('.fee-held')!.textContent).toContain('1000');
    expect(wizard.querySelector('.case-id')!.textContent).toMatch(/case-\d{6}/);
  });

  it('flags a missing evidence list inline without calling the API', () => {
    const doc = newDocument();
    const wizard = renderReportWizard(doc, api('tok-alice'));
    doc.body.append(wizard);
    (wizard.querySelector('button.submit') as HTMLButtonElement).click();
    expect(wizard.querySelector('.feedback')!.textContent).toContain('at least one post');
  });

  it('renders a retry-after countdown when rate limited', async () => {
    // burn carol's remaining capacity straight through the API
    const carol = api('tok-carol');
    for (let i = 0; i < 3; i++) {
      await carol.fileReport({
        accused: 'mallory',
        category: 'Threat',
        narrative: 'threats again',
        evidence: ['post-4'],
      });
    }
    const doc = newDocument();
    const wizard = renderReportWizard(doc, carol, { intervalMs: 10 });
    doc.body.append(wizard);
    setValue(wizard.querySelector('input[name="accused"]'), 'mallory');
    setValue(wizard.querySelector('textarea[name="narrative"]'), 'one more');
    setValue(wizard.querySelector('input[name="evidence"]'), 'post-4');
    (wizard.querySelectorAll('button')[0] as HTMLButtonElement).click();
    (wizard.querySelector('button.submit') as HTMLButtonElement).click();
    await until(
      () => /Retry in \d+s/.test(wizard.querySelector('.feedback')!.textContent ?? ''),
      5000,
      'retry countdown',
    );
  });
});

describe('verifier ballot queue', () => {
  it('shows no raw handle or display name from the unredacted case', async () => {
    const filed = await api('tok-alice').fileReport({
      accused: 'mallory',
      category: 'Doxxing',
      narrative: '@mallory posted where Alice Appleton lives',
      evidence: ['post-2'],
    });
    const token = await verifierWithQueueItem(filed.case.case_id);
    const doc = newDocument();
    const queue = renderBallotQueue(doc, api(token));
    doc.body.append(queue.root);
    await queue.refresh();

    const rendered = queue.root.innerHTML.toLowerCase();
    for (const leaked of ['alice', 'mallory', 'appleton', 'mudd', 'bella', 'carol']) {
      expect(rendered).not.toContain(leaked);
    }
    expect(rendered).toContain('[reporter]');
  });

  it('decrements the queue count when a ballot is submitted', async () => {
    const filed = await api('tok-bella').fileReport({
      accused: 'mallory',
      category: 'Blackmail',
      narrative: '@mallory is extorting me',
      evidence: ['post-3'],
    });
    const token = await verifierWithQueueItem(filed.case.case_id);
    const doc = newDocument();
    const queue = renderBallotQueue(doc, api(token));
    doc.body.append(queue.root);
    await queue.refresh();

    const before = queue.root.querySelectorAll('article.queue-item').length;
    expect(before).toBeGreaterThan(0);
    expect(queue.root.querySelector('.queue-count')!.textContent).toContain(String(before));

    const card = queue.root.querySelector(
      `article[data-case="${filed.case.case_id}"]`,
    ) as HTMLElement;
    (card.querySelector('button.submit') as HTMLButtonElement).click();
    await until(
      () => queue.root.querySelectorAll('article.queue-item').length === before - 1,
      5000,
      'queue shrink',
    );
    expect(queue.root.querySelector('.queue-count')!.textContent).toContain(String(before - 1));
  });

  it('records a single ballot on a double click', async () => {
    const filed = await api('tok-alice').fileReport({
      accused: 'mallory',
      category: 'HateSpeech',
      narrative: 'still at it',
      evidence: ['post-1'],
    });
    const caseId = filed.case.case_id;
    const token = await verifierWithQueueItem(caseId);
    const doc = newDocument();
    const queue = renderBallotQueue(doc, api(token));
    doc.body.append(queue.root);
    await queue.refresh();

    const card = queue.root.querySelector(`article[data-case="${caseId}"]`) as HTMLElement;
    const button = card.querySelector('button.submit') as HTMLButtonElement;
    button.click();
    button.click();
    await until(
      () => queue.root.querySelector(`article[data-case="${caseId}"]`) === null,
      5000,
      'card removed',
    );
    const progress = await api('tok-alice').getProgress(caseId);
    expect(progress.ballots_received).toBe(1);
  });

  it('disables expired items with a deadline-passed note', async () => {
    const filed = await api('tok-bella').fileReport({
      accused: 'mallory',
      category: 'Threat',
      narrative: 'newer threats',
      evidence: ['post-3'],
    });
    const token = await verifierWithQueueItem(filed.case.case_id);
    const doc = newDocument();
    // view the queue from a clock four days ahead: past the 72h deadline
    const future = () => new Date(Date.now() + 4 * 24 * 3_600_000);
    const queue = renderBallotQueue(doc, api(token), { now: future });
    doc.body.append(queue.root);
    await queue.refresh();
    const card = queue.root.querySelector(
      `article[data-case="${filed.case.case_id}"]`,
    ) as HTMLElement;
    expect((card.querySelector('button.submit') as HTMLButtonElement).disabled).toBe(true);
    expect(card.querySelector('.feedback')!.textContent).toBe('deadline passed');
    expect(card.querySelector('.deadline')!.textContent).toBe('deadline passed');
  });
});

describe('certificate checker', () => {
  it('verifies a platform-issued certificate by id and by file', async () => {
    const filed = await api('tok-bella').fileReport({
      accused: 'mallory',
      category: 'Harassment',
      narrative: 'for the certificate test',
      evidence: ['post-3'],
    });
    const certificateId = await settleCase('tok-bella', filed.case.case_id);
    expect(certificateId).toBeTruthy();

    const doc = newDocument();
    const checker = renderCertificateChecker(
      doc,
      api('tok-bella'),
      service.platformPublicKeyHex,
    );
    doc.body.append(checker);

    // by id: platform-side verification
    setValue(checker.querySelector('input[name="certificate-id"]'), certificateId!);
    (checker.querySelector('button.check-id') as HTMLButtonElement).click();
    await until(
      () => checker.querySelector('.badge')!.textContent === 'Valid',
      5000,
      'valid badge',
    );
    expect(checker.querySelector('dd.abuse_type')!.textContent).toBe('Harassment');

    // by file: local signature verification
    const envelope = await api('tok-bella').getCertificate(certificateId!);
    setValue(checker.querySelector('textarea[name="certificate-file"]'), JSON.stringify(envelope));
    (checker.querySelector('button.check-file') as HTMLButtonElement).click();
    expect(checker.querySelector('.badge')!.textContent).toBe('Valid');
    expect(checker.querySelector('dd.description')!.textContent).toContain('certificate test');

    // tampered body: Invalid badge
    const tampered = JSON.parse(JSON.stringify(envelope));
    tampered.body.description = 'a rewritten description';
    setValue(checker.querySelector('textarea[name="certificate-file"]'), JSON.stringify(tampered));
    (checker.querySelector('button.check-file') as HTMLButtonElement).click();
    expect(checker.querySelector('.badge')!.textContent).toBe('Invalid');
    expect(checker.querySelector('.badge')!.getAttribute('data-state')).toBe('invalid');
  });

  it('shows a parse error banner for a malformed upload', () => {
    const doc = newDocument();
    const checker = renderCertificateChecker(doc, api('tok-alice'), service.platformPublicKeyHex);
    doc.body.append(checker);
    setValue(checker.querySelector('textarea[name="certificate-file"]'), 'not json {');
    (checker.querySelector('button.check-file') as HTMLButtonElement).click();
    expect(checker.querySelector('.banner')!.textContent).toContain('Could not parse certificate');
  });

  it('reports an unknown id without a badge', async () => {
    const doc = newDocument();
    const checker = renderCertificateChecker(doc, api('tok-alice'), service.platformPublicKeyHex);
    doc.body.append(checker);
    setValue(checker.querySelector('input[name="certificate-id"]'), 'cert-999999');
    (checker.querySelector('button.check-id') as HTMLButtonElement).click();
    await until(
      () => (checker.querySelector('.banner')!.textContent ?? '').length > 0,
      5000,
      'not-found banner',
    );
    expect(checker.querySelector('.banner')!.textContent).toContain('No certificate');
    expect(checker.querySelector('.badge')!.textContent).toBe('');
  });
});

describe('console shell', () => {
  it('gates views by role and never renders the token', async () => {
    const doc = newDocument();
    const container = doc.getElementById('app') as HTMLElement;
    const mounted = mountConsole(
      doc,
      container,
      { apiBaseUrl: service.baseUrl, platformPublicKeyHex: service.platformPublicKeyHex },
      { actor: 'v1', role: 'Verifier', token: 'tok-v1' },
    );
    const navViews = [...container.querySelectorAll('nav button')].map((b) =>
      b.getAttribute('data-view'),
    );
    expect(navViews).toEqual(['queue', 'certificate']);
    await expect(mounted.show('report')).rejects.toThrow(/not available/);
    expect(container.innerHTML).not.toContain('tok-v1');
    await mounted.show('queue');
    expect(container.querySelector('.ballot-queue')).not.toBeNull();
  });

  it('admin panel reads a zero trial balance', async () => {
    const doc = newDocument();
    const container = doc.getElementById('app') as HTMLElement;
    const mounted = mountConsole(
      doc,
      container,
      { apiBaseUrl: service.baseUrl, platformPublicKeyHex: service.platformPublicKeyHex },
      { actor: 'admin', role: 'Admin', token: 'tok-admin' },
    );
    await mounted.show('admin');
    (container.querySelector('button.load-balance') as HTMLButtonElement).click();
    await until(
      () => (container.querySelector('.trial-balance')!.textContent ?? '').includes('Trial balance'),
      5000,
      'trial balance',
    );
    expect(container.querySelector('.trial-balance')!.textContent).toContain('Trial balance: 0');
  });
});
