// Certificate checker: look one up by id (platform-side verification) or
// paste/upload a certificate file and verify its signature right here.

import { ApiClient, ApiError } from './api.js';
import { clear, el } from './dom.js';
import { parseEnvelope, verifyEnvelope } from './verify.js';

export function renderCertificateChecker(
  doc: Document,
  api: ApiClient,
  platformPublicKeyHex: string,
): HTMLElement {
  const root = el(doc, 'section', { class: 'certificate-checker' });
  root.append(el(doc, 'h2', {}, ['Check an abuse certificate']));

  const badge = el(doc, 'p', { class: 'badge' });
  const banner = el(doc, 'p', { class: 'banner' });
  const details = el(doc, 'dl', { class: 'details' });

  function showBadge(valid: boolean): void {
    badge.textContent = valid ? 'Valid' : 'Invalid';
    badge.setAttribute('data-state', valid ? 'valid' : 'invalid');
  }

  function showDetails(body: Record<string, unknown>): void {
    clear(details);
    for (const field of ['abuse_type', 'description', 'occurred_at', 'aggregate_impact']) {
      if (field in body) {
        details.append(
          el(doc, 'dt', {}, [field.replace('_', ' ')]),
          el(doc, 'dd', { class: field }, [String(body[field])]),
        );
      }
    }
  }

  // -- by id: ask the platform ------------------------------------------------
  const idInput = el(doc, 'input', { name: 'certificate-id', placeholder: 'cert-000001' });
  const idButton = el(doc, 'button', { type: 'button', class: 'check-id' }, ['Check by id']);
  idButton.addEventListener('click', async () => {
    banner.textContent = '';
    clear(details);
    try {
      const verdict = await api.verifyCertificate(idInput.value.trim());
      showBadge(verdict.valid);
      const envelope = await api.getCertificate(idInput.value.trim());
      showDetails(envelope.body);
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) {
        badge.textContent = '';
        banner.textContent = 'No certificate with that id.';
      } else {
        banner.textContent = String(error);
      }
    }
  });

  // -- by file: verify the signature locally -------------------------------------
  const fileInput = el(doc, 'textarea', {
    name: 'certificate-file',
    placeholder: 'paste a certificate file (JSON envelope)',
  });
  const fileButton = el(doc, 'button', { type: 'button', class: 'check-file' }, ['Verify file']);
  fileButton.addEventListener('click', () => {
    banner.textContent = '';
    clear(details);
    badge.textContent = '';
    let envelope;
    try {
      envelope = parseEnvelope(fileInput.value);
    } catch (error) {
      banner.textContent = `Could not parse certificate: ${(error as Error).message}`;
      return;
    }
    showBadge(verifyEnvelope(envelope, platformPublicKeyHex));
    showDetails(envelope.body);
  });

  root.append(
    el(doc, 'label', {}, ['Certificate id ', idInput]),
    idButton,
    el(doc, 'label', {}, ['Certificate file ', fileInput]),
    fileButton,
    badge,
    banner,
    details,
  );
  return root;
}
