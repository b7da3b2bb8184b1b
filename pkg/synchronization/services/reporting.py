"""
Reporting service for clock synchronization simulations.
Handles tabular summaries of campaigns and sweeps and the campaign chart.
"""
from typing import List

import numpy as np
import pandas as pd
import plotly.graph_objects as go

from synchronization.services.simulation import SweepSummary, TrialRecord

TRIAL_COLUMNS = ['trial_id', 'fault_count', 'identical', 'mse']


def records_to_frame(records: List[TrialRecord]) -> pd.DataFrame:
    """
    Flatten trial records into a DataFrame ordered by trial id.

    Args:
        records: Campaign output

    Returns:
        DataFrame with trial_id, fault_count, identical, mse, solver, injected, estimated
    """
    if not records:
        return pd.DataFrame(columns=TRIAL_COLUMNS + ['solver', 'injected', 'estimated'])
    rows = []
    for record in records:
        rows.append({
            'trial_id': record.trial_id,
            'fault_count': record.fault_count,
            'identical': record.distributions_identical,
            'mse': record.mse_offsets,
            'solver': record.solver_used.value,
            'injected': ' '.join(str(e) for e in sorted(record.injected_fault_edges)),
            'estimated': ' '.join(str(e) for e in sorted(record.estimated_fault_edges)),
        })
    return pd.DataFrame(rows).sort_values('trial_id').reset_index(drop=True)


def summarize_campaign(records: List[TrialRecord]) -> pd.DataFrame:
    """
    Per-fault-count summary: trial count, identical-distribution rate and
    mean MSE overall, over identical trials and over mismatched trials.
    """
    df = records_to_frame(records)
    if df.empty:
        return pd.DataFrame(columns=['fault_count', 'trials', 'identical_rate', 'mean_mse',
                                     'mean_mse_identical', 'mean_mse_mismatch'])

    summary = df.groupby('fault_count').agg(
        trials=('trial_id', 'count'),
        identical_rate=('identical', 'mean'),
        mean_mse=('mse', 'mean'),
    ).reset_index()

    # Mean MSE split by outcome; NaN when a group has no such trials
    split = df.groupby(['fault_count', 'identical'])['mse'].mean().unstack()
    summary['mean_mse_identical'] = summary['fault_count'].map(
        split[True] if True in split.columns else pd.Series(dtype=float)
    )
    summary['mean_mse_mismatch'] = summary['fault_count'].map(
        split[False] if False in split.columns else pd.Series(dtype=float)
    )
    return summary


def campaign_csv(records: List[TrialRecord]) -> str:
    """CSV with one row per trial: trial_id, fault_count, identical, mse."""
    return records_to_frame(records)[TRIAL_COLUMNS].to_csv(index=False)


def sweep_frame(summaries: List[SweepSummary]) -> pd.DataFrame:
    return pd.DataFrame([
        {
            'fault_count': s.fault_count,
            'trials': s.trials,
            'successes': s.successes,
            'success_rate': s.success_rate,
            'exhaustive': s.exhaustive,
        }
        for s in summaries
    ])


def campaign_figure(records: List[TrialRecord], title: str = 'Offset MSE per fault count') -> go.Figure:
    """
    Box plot of offset MSE per fault count, split by whether the estimated
    fault distribution matched the injected one.
    """
    df = records_to_frame(records)
    df = df[np.isfinite(df['mse'].astype(float))]
    fig = go.Figure()
    for identical, name, color in [(True, 'identical', '#2ca02c'), (False, 'mismatch', '#d62728')]:
        subset = df[df['identical'] == identical]
        fig.add_trace(go.Box(
            x=subset['fault_count'],
            y=subset['mse'],
            name=name,
            marker_color=color,
            boxmean=True,
        ))
    fig.update_layout(
        title=title,
        xaxis_title='Injected faults',
        yaxis_title='MSE of estimated offsets',
        boxmode='group',
        template='plotly_white',
        height=500,
    )
    return fig
