import utils  # Import from root directory
from utils import ValidationError
from modules.audio_io import read_audio, write_audio
from .stft import StftConfig
from .irm import enhance_irm_with_mask, save_mask
from .mixing import MixtureSpec, mix_condition, measured_snr
from .resample import resample
from ..logo_utils import print_enhance_logo


def _read_at(path, rate: int, channel):
    data, fs = read_audio(path, channel)
    if fs != rate:
        raise ValidationError(f"{path} is {fs} Hz, expected {rate} Hz like the speech file")
    return data


def enhance_command(args):
    """Handle the enhance command."""
    if not (args.speech and args.noise and args.out):
        print_enhance_logo()
        print("\nAvailable options for 'enhance' command:")
        print("-" * 50)
        print("Usage: gesi.py enhance --speech S.wav --noise N.wav --out Y.wav [options]")
        print("\nOptions:")
        print("  --snr DB                 SNR at the ear over active speech (default from config)")
        print("  --rir-target FILE        RIR applied to the speech")
        print("  --rir-noise F1,F2        RIRs applied to the noise (summed)")
        print("  --unprocessed-out FILE   Also write the unprocessed mixture")
        print("  --mask-out FILE          Write the ideal ratio mask")
        print("  --channel CH             Channel of stereo inputs (left, right or index)")
        print("\nExample usage:")
        print("  gesi.py enhance --speech word.wav --noise babble.wav --snr -6 --out word_irm.wav")
        return

    config = utils.load_config()
    section = config.get("enhance", {})
    snr = args.snr if args.snr is not None else float(section.get("snr", 0.0))
    stft_config = StftConfig(sample_rate=int(section.get("sample_rate", 16000)))

    speech, fs = read_audio(args.speech, args.channel)
    noise = _read_at(args.noise, fs, args.channel)
    rir_target = _read_at(args.rir_target, fs, args.channel) if args.rir_target else None
    rir_noise = [_read_at(p, fs, args.channel) for p in (args.rir_noise or [])]

    # The mask is computed at the STFT rate
    work_rate = stft_config.sample_rate
    speech_w = resample(speech, fs, work_rate)
    noise_w = resample(noise, fs, work_rate)
    rir_target_w = resample(rir_target, fs, work_rate) if rir_target is not None else None
    rir_noise_w = [resample(r, fs, work_rate) for r in rir_noise]

    mixed = mix_condition(speech_w, noise_w, MixtureSpec(snr=snr, rir_target=rir_target_w,
                                                         rir_noise_list=rir_noise_w), work_rate)
    enhanced, mask = enhance_irm_with_mask(mixed.speech_at_ear, mixed.noise, stft_config, work_rate)

    residual = enhanced - mixed.speech_at_ear
    utils.info(f"SNR at the ear {snr:.2f} dB; after IRM "
               f"{measured_snr(mixed.speech_at_ear, residual, work_rate):.2f} dB")

    write_audio(args.out, resample(enhanced, work_rate, fs), fs)
    utils.info(f"Enhanced signal written to {args.out}")
    if args.unprocessed_out:
        write_audio(args.unprocessed_out, resample(mixed.mixture, work_rate, fs), fs)
        utils.info(f"Unprocessed mixture written to {args.unprocessed_out}")
    if args.mask_out:
        save_mask(args.mask_out, mask, stft_config)
        utils.info(f"Mask written to {args.mask_out}")


def register_command(subparsers):
    """Register the 'enhance' command with the subparsers."""
    enhance_parser = subparsers.add_parser("enhance", help="Mix speech and noise and apply the IRM")
    enhance_parser.add_argument("--speech", type=utils.file_path, help="Clean speech WAV file")
    enhance_parser.add_argument("--noise", type=utils.file_path, help="Noise WAV file (at least as long as the speech)")
    enhance_parser.add_argument("--snr", type=float, help="SNR in dB")
    enhance_parser.add_argument("--rir-target", type=utils.file_path, help="RIR WAV for the speech")
    enhance_parser.add_argument("--rir-noise", type=utils.path_list, help="Comma-separated RIR WAVs for the noise")
    enhance_parser.add_argument("--out", help="Output WAV for the enhanced signal")
    enhance_parser.add_argument("--unprocessed-out", help="Output WAV for the unprocessed mixture")
    enhance_parser.add_argument("--mask-out", help="Output file for the mask")
    enhance_parser.add_argument("--channel", help="Channel of stereo inputs (left, right or index)")
    enhance_parser.set_defaults(func=enhance_command)
