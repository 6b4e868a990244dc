import { ApiClient, ApiError } from './api.js';
import { PlaybackController } from './playback.js';
import { captureUtterance, recognitionSupported } from './speech.js';
import { loadSettings, saveSettings } from './settings.js';
import type { AgentResponse, Directive, Settings, SuggestionItem, TranscriptEntry } from './types.js';

const ORDINAL_WORDS: Record<string, string[]> = {
  en: ['first', 'second', 'third', 'fourth', 'fifth', 'sixth', 'seventh', 'eighth', 'ninth'],
  de: ['erste', 'zweite', 'dritte', 'vierte', 'fuenfte', 'sechste', 'siebte', 'achte', 'neunte'],
};

/** The spoken selection a numbered suggestion button stands for. */
export function utteranceForSuggestion(number: number, language: string): string {
  const words = ORDINAL_WORDS[language] ?? ORDINAL_WORDS.en;
  const word = words[number - 1] ?? String(number);
  return language === 'de' ? `${word}r Artikel` : `${word} article`;
}

export interface ChatUiOptions {
  api: ApiClient;
  playback: PlaybackController;
  settings?: Settings;
  storage?: Storage | null;
}

/**
 * Builds the chat interface inside `root` and wires it to the API.
 *
 * The UI holds no dialogue logic: suggestion numbers, titles, and
 * playback directives are taken verbatim from the latest AgentResponse.
 */
export class ChatUi {
  readonly transcript: TranscriptEntry[] = [];
  lastResponse: AgentResponse | null = null;
  sessionId: string | null = null;
  settings: Settings;
  private pending = false;

  private readonly transcriptEl: HTMLElement;
  private readonly suggestionsEl: HTMLElement;
  private readonly bannerEl: HTMLElement;
  private readonly inputEl: HTMLInputElement;
  private readonly micButton: HTMLButtonElement;
  private readonly stateEl: HTMLElement;

  constructor(root: HTMLElement, private readonly options: ChatUiOptions) {
    this.settings = options.settings ?? loadSettings(options.storage ?? null);
    this.options.playback.configure(this.settings.rate, this.settings.voice);
    this.options.playback.onStateChange = (state) => {
      this.stateEl.textContent = state;
    };

    root.innerHTML = '';
    this.bannerEl = el('div', 'banner hidden');
    this.transcriptEl = el('div', 'transcript');
    this.suggestionsEl = el('div', 'suggestions');
    this.stateEl = el('span', 'playback-state');
    this.stateEl.textContent = 'idle';

    const controls = el('div', 'controls');
    this.micButton = el('button', 'mic') as HTMLButtonElement;
    this.micButton.textContent = '🎤';
    this.micButton.addEventListener('click', () => void this.captureAndSend());
    this.inputEl = el('input', 'text-input') as HTMLInputElement;
    this.inputEl.placeholder = 'Type an utterance…';
    this.inputEl.addEventListener('keydown', (event) => {
      if ((event as KeyboardEvent).key === 'Enter') void this.submitText();
    });
    const sendButton = el('button', 'send') as HTMLButtonElement;
    sendButton.textContent = 'Send';
    sendButton.addEventListener('click', () => void this.submitText());

    const playbackControls = el('div', 'playback-controls');
    for (const directive of ['pause', 'play', 'again', 'next'] as Directive[]) {
      const button = el('button', `control-${directive}`) as HTMLButtonElement;
      button.textContent = directive;
      button.addEventListener('click', () => this.options.playback.apply(directive));
      playbackControls.append(button);
    }
    playbackControls.append(this.stateEl);

    controls.append(this.micButton, this.inputEl, sendButton);
    root.append(this.bannerEl, this.transcriptEl, this.suggestionsEl, controls, playbackControls, this.buildSettingsPanel());

    if (this.settings.textOnly || !recognitionSupported()) {
      this.micButton.disabled = true;
      this.micButton.title = 'speech input unavailable; type instead';
    }
  }

  async start(): Promise<void> {
    try {
      const created = await this.options.api.createSession(this.settings.language);
      this.sessionId = created.session_id;
      this.handleResponse(created.response);
      this.hideBanner();
    } catch (err) {
      this.showBanner(`Could not reach the news service. ${String(err)}`, () => void this.start());
    }
  }

  /** Mic-button path: record, then send like typed text. */
  async captureAndSend(): Promise<void> {
    let text: string;
    try {
      text = await captureUtterance(this.settings.language);
    } catch {
      this.settings.textOnly = true;
      this.micButton.disabled = true;
      this.inputEl.focus();
      return;
    }
    await this.send(text);
  }

  async submitText(): Promise<void> {
    const text = this.inputEl.value.trim();
    if (!text) return;
    this.inputEl.value = '';
    await this.send(text);
  }

  async send(text: string): Promise<void> {
    if (this.pending || !this.sessionId) return;
    this.pending = true;
    this.appendTranscript({ speaker: 'user', text });
    try {
      const response = await this.options.api.sendUtterance(this.sessionId, text);
      this.hideBanner();
      this.handleResponse(response);
    } catch (err) {
      const retry = () => void this.send(text);
      const detail = err instanceof ApiError ? err.message : String(err);
      this.transcript.pop(); // the turn did not happen; retry re-adds it
      this.renderTranscript();
      this.showBanner(`Request failed (${detail}).`, retry);
    } finally {
      this.pending = false;
    }
  }

  /** Render and speak one agent response; suggestions are taken verbatim. */
  handleResponse(response: AgentResponse): void {
    this.lastResponse = response;
    if (response.text) this.appendTranscript({ speaker: 'agent', text: response.text });
    this.renderSuggestions(response.suggestions);
    for (const directive of response.directives) {
      this.options.playback.apply(directive as Directive);
    }
    if (response.text && !this.settings.textOnly) {
      this.options.playback.speak(response.text);
    }
  }

  private appendTranscript(entry: TranscriptEntry): void {
    this.transcript.push(entry);
    this.renderTranscript();
  }

  private renderTranscript(): void {
    this.transcriptEl.innerHTML = '';
    for (const entry of this.transcript) {
      const line = el('p', `line ${entry.speaker}`);
      line.textContent = `${entry.speaker === 'user' ? 'You' : 'Agent'}: ${entry.text}`;
      this.transcriptEl.append(line);
    }
    this.transcriptEl.scrollTop = this.transcriptEl.scrollHeight;
  }

  private renderSuggestions(suggestions: SuggestionItem[]): void {
    this.suggestionsEl.innerHTML = '';
    for (const suggestion of suggestions) {
      const button = el('button', 'suggestion') as HTMLButtonElement;
      button.dataset.number = String(suggestion.number);
      button.dataset.key = suggestion.key;
      button.textContent = `${suggestion.number}. ${suggestion.title}`;
      button.addEventListener('click', () =>
        void this.send(utteranceForSuggestion(suggestion.number, this.settings.language)),
      );
      this.suggestionsEl.append(button);
    }
  }

  private buildSettingsPanel(): HTMLElement {
    const panel = el('details', 'settings');
    const summary = el('summary');
    summary.textContent = 'Settings';
    panel.append(summary);

    const rate = el('input', 'setting-rate') as HTMLInputElement;
    rate.type = 'range';
    rate.min = '0.5';
    rate.max = '2.0';
    rate.step = '0.1';
    rate.value = String(this.settings.rate);
    rate.addEventListener('change', () => {
      this.settings.rate = Number(rate.value);
      this.persistSettings();
    });
    panel.append(labeled('Reading speed', rate));

    const voice = el('input', 'setting-voice') as HTMLInputElement;
    voice.type = 'text';
    voice.placeholder = 'voice name (optional)';
    voice.value = this.settings.voice ?? '';
    voice.addEventListener('change', () => {
      this.settings.voice = voice.value || null;
      this.persistSettings();
    });
    panel.append(labeled('Voice', voice));

    const language = el('select', 'setting-language') as HTMLSelectElement;
    for (const lang of ['en', 'de']) {
      const option = document.createElement('option');
      option.value = lang;
      option.textContent = lang;
      if (lang === this.settings.language) option.selected = true;
      language.append(option);
    }
    language.addEventListener('change', () => {
      this.settings.language = language.value;
      this.persistSettings();
      void this.start(); // language change needs a fresh session
    });
    panel.append(labeled('Language', language));

    const textOnly = el('input', 'setting-textonly') as HTMLInputElement;
    textOnly.type = 'checkbox';
    textOnly.checked = this.settings.textOnly;
    textOnly.addEventListener('change', () => {
      this.settings.textOnly = textOnly.checked;
      this.micButton.disabled = textOnly.checked || !recognitionSupported();
      this.persistSettings();
    });
    panel.append(labeled('Text-only mode', textOnly));
    return panel;
  }

  private persistSettings(): void {
    this.options.playback.configure(this.settings.rate, this.settings.voice);
    saveSettings(this.settings, this.options.storage ?? null);
  }

  private showBanner(message: string, retry: () => void): void {
    this.bannerEl.className = 'banner';
    this.bannerEl.innerHTML = '';
    const text = el('span');
    text.textContent = message;
    const button = el('button', 'retry') as HTMLButtonElement;
    button.textContent = 'Retry';
    button.addEventListener('click', retry);
    this.bannerEl.append(text, button);
  }

  private hideBanner(): void {
    this.bannerEl.className = 'banner hidden';
    this.bannerEl.innerHTML = '';
  }
}

function el(tag: string, className = ''): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  return node;
}

function labeled(text: string, control: HTMLElement): HTMLElement {
  const label = el('label');
  const span = el('span');
  span.textContent = text;
  label.append(span, control);
  return label;
}
