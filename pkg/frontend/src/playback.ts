import type { Directive, PlaybackState } from './types.js';

/**
 * Minimal surface of the browser speech synthesis used by the controller,
 * so tests can inject a fake engine.
 */
export interface SynthesisEngine {
  speak(text: string, rate: number, voice: string | null, onend: () => void): void;
  pause(): void;
  resume(): void;
  cancel(): void;
}

/** speechSynthesis-backed engine; returns null when the API is missing. */
export function browserSynthesis(): SynthesisEngine | null {
  if (typeof window === 'undefined' || !('speechSynthesis' in window)) return null;
  const synth = window.speechSynthesis;
  return {
    speak(text, rate, voice, onend) {
      const utterance = new SpeechSynthesisUtterance(text);
      utterance.rate = rate;
      if (voice) {
        const match = synth.getVoices().find((v) => v.name === voice);
        if (match) utterance.voice = match;
      }
      utterance.onend = onend;
      synth.speak(utterance);
    },
    pause: () => synth.pause(),
    resume: () => synth.resume(),
    cancel: () => synth.cancel(),
  };
}

const TRANSITIONS: Record<PlaybackState, Partial<Record<string, PlaybackState>>> = {
  idle: { speak: 'speaking' },
  speaking: { pause: 'paused', end: 'idle', cancel: 'idle', speak: 'speaking' },
  paused: { play: 'speaking', cancel: 'idle', speak: 'speaking' },
};

/**
 * Playback state machine over {idle, speaking, paused}.
 *
 * Directives map onto the machine: pause/play drive the current
 * utterance, again restarts the last spoken text, next cancels it (the
 * queue advances to whatever the next response brings). Illegal inputs
 * (pausing while idle, playing while speaking) are ignored rather than
 * throwing, so random directive storms cannot corrupt the state.
 */
export class PlaybackController {
  private state: PlaybackState = 'idle';
  private lastText = '';
  private rate = 1.0;
  private voice: string | null = null;
  readonly visualOnly: boolean;

  constructor(
    private readonly engine: SynthesisEngine | null,
    public onStateChange: (state: PlaybackState) => void = () => {},
  ) {
    this.visualOnly = engine === null;
  }

  getState(): PlaybackState {
    return this.state;
  }

  configure(rate: number, voice: string | null): void {
    this.rate = rate;
    this.voice = voice;
  }

  private transition(event: string): boolean {
    const next = TRANSITIONS[this.state][event];
    if (next === undefined) return false;
    if (next !== this.state) {
      this.state = next;
      this.onStateChange(next);
    }
    return true;
  }

  /** Speak a response's plain text; replaces whatever is playing. */
  speak(text: string): void {
    if (!text) return;
    this.lastText = text;
    if (this.visualOnly) return;
    this.engine!.cancel();
    this.transition('speak');
    this.engine!.speak(text, this.rate, this.voice, () => this.transition('end'));
  }

  /** Apply a server directive or a user control of the same name. */
  apply(directive: Directive): void {
    switch (directive) {
      case 'pause':
        if (this.transition('pause') && !this.visualOnly) this.engine!.pause();
        break;
      case 'play':
        if (this.transition('play') && !this.visualOnly) this.engine!.resume();
        break;
      case 'again':
        if (this.lastText) this.speak(this.lastText);
        break;
      case 'next':
        if (this.transition('cancel') && !this.visualOnly) this.engine!.cancel();
        break;
    }
  }

  /** Engine finished on its own (exposed for fakes/tests). */
  handleEnd(): void {
    this.transition('end');
  }
}

/** The states reachable from a given state; used by the property test. */
export function legalNextStates(state: PlaybackState): Set<PlaybackState> {
  const reachable = Object.values(TRANSITIONS[state]).filter(
    (s): s is PlaybackState => s !== undefined,
  );
  return new Set<PlaybackState>([state, ...reachable]);
}
