// Admin views: ledger conservation audit and linkage cluster inspection.

import { ApiClient } from './api.js';
import { clear, el } from './dom.js';

export function renderAdminPanel(doc: Document, api: ApiClient): HTMLElement {
  const root = el(doc, 'section', { class: 'admin-panel' });
  root.append(el(doc, 'h2', {}, ['Admin']));

  const balance = el(doc, 'p', { class: 'trial-balance' });
  const balanceButton = el(doc, 'button', { type: 'button', class: 'load-balance' }, [
    'Check trial balance',
  ]);
  balanceButton.addEventListener('click', async () => {
    const result = await api.trialBalance();
    balance.textContent = `Trial balance: ${result.trial_balance}`;
    balance.setAttribute('data-ok', result.trial_balance === 0 ? 'true' : 'false');
  });

  const account = el(doc, 'input', { name: 'account', placeholder: 'account id' });
  const linkageButton = el(doc, 'button', { type: 'button', class: 'load-linkage' }, [
    'Inspect linkage',
  ]);
  const cluster = el(doc, 'ul', { class: 'cluster' });
  linkageButton.addEventListener('click', async () => {
    const info = await api.linkage(account.value.trim());
    clear(cluster);
    cluster.append(el(doc, 'li', { class: 'cluster-id' }, [`cluster ${info.cluster_id}`]));
    for (const member of info.members) {
      cluster.append(el(doc, 'li', { class: 'member' }, [member]));
    }
  });

  root.append(
    balanceButton,
    balance,
    el(doc, 'label', {}, ['Account ', account]),
    linkageButton,
    cluster,
  );
  return root;
}
