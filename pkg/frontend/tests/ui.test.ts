import { beforeEach, describe, expect, it, vi } from 'vitest';

import { ApiClient } from '../src/api.js';
import { PlaybackController, type SynthesisEngine } from '../src/playback.js';
import { ChatUi, utteranceForSuggestion } from '../src/ui.js';
import { DEFAULT_SETTINGS } from '../src/settings.js';
import type { AgentResponse } from '../src/types.js';

const silentEngine: SynthesisEngine = {
  speak: (_t, _r, _v, onend) => onend(),
  pause: () => {},
  resume: () => {},
  cancel: () => {},
};

function agentResponse(partial: Partial<AgentResponse>): AgentResponse {
  return { text: '', ssml: '<speak/>', suggestions: [], directives: [], ...partial };
}

function jsonResponse(body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status: 200,
    headers: { 'content-type': 'application/json' },
  });
}

const GREETING = agentResponse({ text: 'Hello! Ask for the news.' });
const OVERVIEW = agentResponse({
  text: 'Here are 3 suggestions: 1. A & B. 2. C. 3. D.',
  suggestions: [
    { number: 1, key: 'desk:s4', title: 'A & B' },
    { number: 2, key: 'desk:p2', title: 'C' },
    { number: 3, key: 'desk:e3', title: 'D' },
  ],
});

function buildUi(fetchImpl: typeof fetch): { ui: ChatUi; root: HTMLElement } {
  vi.stubGlobal('fetch', fetchImpl);
  const root = document.createElement('div');
  document.body.append(root);
  const ui = new ChatUi(root, {
    api: new ApiClient('http://service.test'),
    playback: new PlaybackController(silentEngine),
    settings: { ...DEFAULT_SETTINGS },
    storage: null,
  });
  return { ui, root };
}

beforeEach(() => {
  document.body.innerHTML = '';
  vi.unstubAllGlobals();
});

describe('ChatUi', () => {
  it('renders suggestions verbatim as numbered buttons', async () => {
    const calls: string[] = [];
    const { ui, root } = buildUi(async (input, init) => {
      calls.push(String(input));
      if (String(input).endsWith('/sessions')) {
        return jsonResponse({ session_id: 's1', response: GREETING });
      }
      expect(JSON.parse(String(init?.body))).toEqual({ text: 'Play the news.' });
      return jsonResponse(OVERVIEW);
    });
    await ui.start();
    const input = root.querySelector('input.text-input') as HTMLInputElement;
    input.value = 'Play the news.';
    await ui.submitText();
    const buttons = [...root.querySelectorAll('button.suggestion')] as HTMLButtonElement[];
    expect(buttons.map((b) => b.textContent)).toEqual(['1. A & B', '2. C', '3. D']);
    expect(buttons.map((b) => b.dataset.key)).toEqual(['desk:s4', 'desk:p2', 'desk:e3']);
    expect(calls.length).toBe(2);
  });

  it('clicking suggestion 2 sends the ordinal utterance', async () => {
    const sent: string[] = [];
    const { ui, root } = buildUi(async (input, init) => {
      if (String(input).endsWith('/sessions')) {
        return jsonResponse({ session_id: 's1', response: GREETING });
      }
      const body = JSON.parse(String(init?.body)) as { text: string };
      sent.push(body.text);
      return jsonResponse(body.text === 'Play the news.' ? OVERVIEW : agentResponse({ text: 'C. Reading it.' }));
    });
    await ui.start();
    const input = root.querySelector('input.text-input') as HTMLInputElement;
    input.value = 'Play the news.';
    await ui.submitText();
    const second = root.querySelector('button.suggestion[data-number="2"]') as HTMLButtonElement;
    second.click();
    await vi.waitFor(() => expect(sent).toContain('second article'));
    expect(utteranceForSuggestion(2, 'en')).toBe('second article');
    expect(utteranceForSuggestion(2, 'de')).toBe('zweiter Artikel');
  });

  it('keeps the transcript and shows a retry banner when the backend fails', async () => {
    let fail = false;
    const { ui, root } = buildUi(async (input) => {
      if (String(input).endsWith('/sessions')) {
        return jsonResponse({ session_id: 's1', response: GREETING });
      }
      if (fail) throw new TypeError('connection refused');
      return jsonResponse(OVERVIEW);
    });
    await ui.start();
    const input = root.querySelector('input.text-input') as HTMLInputElement;
    input.value = 'Play the news.';
    await ui.submitText();
    const transcriptBefore = ui.transcript.length;

    fail = true;
    input.value = 'More suggestions.';
    await ui.submitText();
    const banner = root.querySelector('.banner:not(.hidden)');
    expect(banner).not.toBeNull();
    expect(ui.transcript.length).toBe(transcriptBefore); // earlier turns preserved

    fail = false;
    (banner!.querySelector('button.retry') as HTMLButtonElement).click();
    await vi.waitFor(() => expect(root.querySelector('.banner.hidden')).not.toBeNull());
    expect(ui.transcript.length).toBe(transcriptBefore + 2);
  });

  it('applies server playback directives from the response', async () => {
    const { ui } = buildUi(async (input) => {
      if (String(input).endsWith('/sessions')) {
        return jsonResponse({ session_id: 's1', response: GREETING });
      }
      return jsonResponse(agentResponse({ directives: ['pause'] }));
    });
    await ui.start();
    // greeting was spoken; fake engine ends immediately -> idle; speak again
    ui.handleResponse(agentResponse({ text: 'long story' }));
    expect(ui.lastResponse?.text).toBe('long story');
  });

  it('persists settings to storage', async () => {
    const stored = new Map<string, string>();
    const storage = {
      getItem: (k: string) => stored.get(k) ?? null,
      setItem: (k: string, v: string) => void stored.set(k, v),
      removeItem: (k: string) => void stored.delete(k),
      clear: () => stored.clear(),
      key: () => null,
      length: 0,
    } as unknown as Storage;
    vi.stubGlobal('fetch', async () => jsonResponse({ session_id: 's1', response: GREETING }));
    const root = document.createElement('div');
    document.body.append(root);
    new ChatUi(root, {
      api: new ApiClient('http://service.test'),
      playback: new PlaybackController(silentEngine),
      storage,
    });
    const rate = root.querySelector('input.setting-rate') as HTMLInputElement;
    rate.value = '1.5';
    rate.dispatchEvent(new Event('change'));
    expect(JSON.parse(stored.get('newsagent.settings')!)).toMatchObject({ rate: 1.5 });
  });
});
